#include "reldiff/interp.hpp"

#include <algorithm>
#include <cmath>

namespace reldiff {

PchipCurve::PchipCurve(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw ValidationError("PchipCurve: need >= 2 nodes and matching arrays");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ValidationError("PchipCurve: x not increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    if (n == 2) {
        m_[0] = m_[1] = delta[0];
        return;
    }
    // interior: Fritsch-Carlson weighted harmonic mean, zero across extrema
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0) != (delta[i] > 0)) {
            m_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // endpoints: three-point one-sided estimate, clipped to keep monotonicity
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if ((m > 0) != (d0 > 0) || d0 == 0.0) m = 0.0;
        else if ((d0 > 0) != (d1 > 0) && std::abs(m) > 3.0 * std::abs(d0)) m = 3.0 * d0;
        return m;
    };
    m_[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    m_[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t PchipCurve::find_interval(double xq) const {
    if (xq <= x_.front()) return 0;
    if (xq >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double PchipCurve::operator()(double xq) const {
    const std::size_t i = find_interval(xq);
    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
}

double PchipCurve::derivative(double xq) const {
    const std::size_t i = find_interval(xq);
    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t;
    const double dh00 = (6 * t2 - 6 * t) / h;
    const double dh10 = 3 * t2 - 4 * t + 1;
    const double dh01 = (-6 * t2 + 6 * t) / h;
    const double dh11 = 3 * t2 - 2 * t;
    return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
}

InverseCdf::InverseCdf(std::vector<double> x, std::vector<double> cdf)
    : curve_(std::move(x), std::move(cdf)) {
    const auto& F = curve_.y();
    for (std::size_t i = 1; i < F.size(); ++i)
        if (F[i] < F[i - 1] - 1e-14) throw ValidationError("InverseCdf: cdf not nondecreasing");
    if (std::abs(F.front()) > 1e-9 || std::abs(F.back() - 1.0) > 1e-9)
        throw ValidationError("InverseCdf: cdf must run from 0 to 1");
}

double InverseCdf::operator()(double u) const {
    const auto& xs = curve_.x();
    const auto& Fs = curve_.y();
    if (u <= Fs.front()) return xs.front();
    if (u >= Fs.back()) return xs.back();
    // bracket by table lookup, then safeguarded Newton on the cubic
    auto it = std::upper_bound(Fs.begin(), Fs.end(), u);
    std::size_t i = static_cast<std::size_t>(it - Fs.begin()) - 1;
    while (i + 2 < Fs.size() && Fs[i + 1] <= u) ++i;  // skip flat spots
    double lo = xs[i], hi = xs[i + 1];
    double r = lo + (hi - lo) * (u - Fs[i]) / std::max(Fs[i + 1] - Fs[i], 1e-300);
    for (int iter = 0; iter < 60; ++iter) {
        double fu = curve_(r) - u;
        if (fu > 0)
            hi = r;
        else
            lo = r;
        double dr = curve_.derivative(r);
        double step = (dr > 1e-300) ? fu / dr : 0.0;
        double next = r - step;
        if (step == 0.0 || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-15 * (1.0 + std::abs(r))) return next;
        r = next;
        if (std::abs(fu) < 1e-13) return r;
    }
    return r;
}

}  // namespace reldiff
