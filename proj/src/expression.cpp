#include "reldiff/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace reldiff {
namespace {

constexpr int kMaxNesting = 200;
constexpr int kEvalStackSize = 64;

class ExprParser {
public:
    explicit ExprParser(const std::string& s, std::vector<std::pair<char, double>>& out)
        : src_(s), out_(out) {}

    void run() {
        parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("trailing characters");
    }

private:
    const std::string& src_;
    std::vector<std::pair<char, double>>& out_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("expression parse error at offset " + std::to_string(pos_) +
                              " in \"" + src_ + "\": " + what);
    }
    struct DepthGuard {
        int& d;
        explicit DepthGuard(ExprParser& p) : d(p.depth_) {
            if (++d > kMaxNesting) throw ValidationError("expression nested too deeply");
        }
        ~DepthGuard() { --d; }
    };

    void parse_expr() {
        DepthGuard guard(*this);
        parse_term();
        for (;;) {
            if (consume('+')) {
                parse_term();
                out_.push_back({'+', 0.0});
            } else if (consume('-')) {
                parse_term();
                out_.push_back({'-', 0.0});
            } else {
                return;
            }
        }
    }
    void parse_term() {
        parse_factor();
        for (;;) {
            if (consume('*')) {
                parse_factor();
                out_.push_back({'*', 0.0});
            } else if (consume('/')) {
                parse_factor();
                out_.push_back({'/', 0.0});
            } else {
                return;
            }
        }
    }
    // factor := unary ('^' factor)?   -- power is right-associative
    void parse_factor() {
        DepthGuard guard(*this);
        parse_unary();
        if (consume('^')) {
            parse_factor();
            out_.push_back({'^', 0.0});
        }
    }
    void parse_unary() {
        if (consume('-')) {
            parse_unary();
            out_.push_back({'n', 0.0});
            return;
        }
        parse_primary();
    }
    void parse_primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!consume(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = src_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) fail("bad numeric literal");
            pos_ += static_cast<std::size_t>(end - start);
            out_.push_back({'c', v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t begin = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            std::string word = src_.substr(begin, pos_ - begin);
            if (word == "r") {
                out_.push_back({'r', 0.0});
                return;
            }
            if (word == "sqrt" || word == "exp") {
                if (!consume('(')) fail("expected '(' after " + word);
                parse_expr();
                if (!consume(')')) fail("expected ')'");
                out_.push_back({word == "sqrt" ? 's' : 'e', 0.0});
                return;
            }
            fail("unknown identifier '" + word + "' (allowed: r, sqrt, exp)");
        }
        fail("expected a number, 'r', a function, or '('");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    std::vector<std::pair<char, double>> tokens;
    ExprParser(text, tokens).run();

    Expression ex;
    ex.text_ = text;
    int depth = 0, max_depth = 0;
    for (auto& [tag, v] : tokens) {
        switch (tag) {
            case 'c': ex.prog_.push_back({Op::push_const, v}); ++depth; break;
            case 'r': ex.prog_.push_back({Op::push_r, 0.0}); ++depth; break;
            case '+': ex.prog_.push_back({Op::add, 0.0}); --depth; break;
            case '-': ex.prog_.push_back({Op::sub, 0.0}); --depth; break;
            case '*': ex.prog_.push_back({Op::mul, 0.0}); --depth; break;
            case '/': ex.prog_.push_back({Op::div, 0.0}); --depth; break;
            case '^': ex.prog_.push_back({Op::pow, 0.0}); --depth; break;
            case 'n': ex.prog_.push_back({Op::neg, 0.0}); break;
            case 's': ex.prog_.push_back({Op::sqrt_fn, 0.0}); break;
            case 'e': ex.prog_.push_back({Op::exp_fn, 0.0}); break;
        }
        if (depth > max_depth) max_depth = depth;
    }
    if (ex.prog_.empty()) throw ValidationError("empty expression");
    if (max_depth >= kEvalStackSize)
        throw ValidationError("expression too complex (operand stack limit)");
    return ex;
}

double Expression::operator()(double r) const {
    double stack[kEvalStackSize];
    int top = -1;
    for (const Instr& in : prog_) {
        switch (in.op) {
            case Op::push_const: stack[++top] = in.value; break;
            case Op::push_r: stack[++top] = r; break;
            case Op::add: --top; stack[top] += stack[top + 1]; break;
            case Op::sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::div: --top; stack[top] /= stack[top + 1]; break;
            case Op::pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case Op::neg: stack[top] = -stack[top]; break;
            case Op::sqrt_fn: stack[top] = std::sqrt(stack[top]); break;
            case Op::exp_fn: stack[top] = std::exp(stack[top]); break;
        }
    }
    return stack[0];
}

}  // namespace reldiff
