#include "reldiff/rng.hpp"

#include <cmath>

namespace reldiff {

namespace {
// 256-layer constants: R is the base-strip abscissa, V the per-layer area.
constexpr double kZigR = 3.6541528853610088;
constexpr double kZigV = 0.00492867323399708743;
}  // namespace

struct ZigguratNormal::Tables {
    double x[257];   // layer abscissae, x[0] virtual base width, x[256] = 0
    double w[256];   // premultiplied x[i] * 2^-52
    double f[257];   // exp(-x^2/2) at the abscissae
    std::uint64_t k[256];  // rectangle acceptance thresholds on 52 bits

    Tables() {
        const double fR = std::exp(-0.5 * kZigR * kZigR);
        x[0] = kZigV / fR;  // virtual: base strip has area V = R*fR + tail
        x[1] = kZigR;
        for (int i = 2; i < 256; ++i) {
            double prev = x[i - 1];
            x[i] = std::sqrt(-2.0 * std::log(kZigV / prev + std::exp(-0.5 * prev * prev)));
        }
        x[256] = 0.0;
        for (int i = 0; i <= 256; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
        for (int i = 0; i < 256; ++i) {
            w[i] = x[i] * 0x1.0p-52;
            k[i] = static_cast<std::uint64_t>((x[i + 1] / x[i]) * 0x1.0p52);
        }
    }
};

const ZigguratNormal::Tables& ZigguratNormal::tables() {
    static const Tables t;
    return t;
}

double ZigguratNormal::table_closure_defect() {
    // The layer recurrence must land on f = 1 at x = 0.
    const Tables& t = tables();
    double arg = kZigV / t.x[255] + std::exp(-0.5 * t.x[255] * t.x[255]);
    return std::abs(arg - 1.0);
}

double ZigguratNormal::operator()(Xoshiro256pp& g) const {
    const Tables& t = tables();
    for (;;) {
        const std::uint64_t u = g.next();
        const int idx = static_cast<int>(u & 255u);
        const bool neg = (u >> 8) & 1u;
        const std::uint64_t rabs = u >> 12;  // 52 bits, independent of idx/sign
        double x = static_cast<double>(rabs) * t.w[idx];
        if (rabs < t.k[idx]) return neg ? -x : x;
        if (idx == 0) {
            // base strip miss: sample the tail beyond R by exponential rejection
            double xt, yt;
            do {
                xt = -std::log(g.unit_open()) / kZigR;
                yt = -std::log(g.unit_open());
            } while (yt + yt < xt * xt);
            double v = kZigR + xt;
            return neg ? -v : v;
        }
        // wedge: layer idx spans abscissae [x[idx+1], x[idx]]
        const double y = t.f[idx] + g.unit() * (t.f[idx + 1] - t.f[idx]);
        if (y < std::exp(-0.5 * x * x)) return neg ? -x : x;
    }
}

}  // namespace reldiff
