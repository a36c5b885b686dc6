#include <dtm/series.hpp>

#include <dtm/error.hpp>
#include <dtm/simd.hpp>

#include <cmath>
#include <sstream>
#include <string>

namespace dtm {
namespace {

std::string fmt_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_same_order(const Series& a, const Series& b, std::string_view op) {
    if (a.order() != b.order()) {
        throw OrderMismatch(std::string(op) + ": truncation orders differ (" + std::to_string(a.order()) + " vs " +
                            std::to_string(b.order()) + ")");
    }
}

// j * u[j] for j = 0..N; the weighted sequence every first-order recurrence uses.
std::vector<double> index_weighted(const Series& u) {
    std::vector<double> w(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        w[j] = static_cast<double>(j) * u[j];
    }
    return w;
}

// sum_{j=1}^{k} x[j] * y[k-j]
double tail_conv(const std::vector<double>& x, const std::vector<double>& y, std::size_t k) {
    return simd::dot_reversed(std::span<const double>(x).subspan(1, k), std::span<const double>(y).first(k));
}

double tail_conv(std::span<const double> x, const std::vector<double>& y, std::size_t k) {
    return simd::dot_reversed(x.subspan(1, k), std::span<const double>(y).first(k));
}

Series exp_series(const Series& u) {
    const auto ju = index_weighted(u);
    std::vector<double> w(u.size());
    w[0] = std::exp(u[0]);
    for (std::size_t k = 1; k < u.size(); ++k) {
        w[k] = tail_conv(ju, w, k) / static_cast<double>(k);
    }
    return Series(std::move(w));
}

Series ln_series(const Series& u) {
    if (!(u[0] > 0.0)) {
        throw DomainError("ln: constant term " + fmt_real(u[0]) + " is not positive");
    }
    std::vector<double> w(u.size());
    std::vector<double> jw(u.size());
    w[0] = std::log(u[0]);
    for (std::size_t k = 1; k < u.size(); ++k) {
        // u = e^w  =>  k u_k = sum_{j=1}^{k} j w_j u_{k-j}
        double acc = 0.0;
        if (k > 1) {
            acc = simd::dot_reversed(std::span<const double>(jw).subspan(1, k - 1),
                                     u.coeffs().subspan(1, k - 1));
        }
        w[k] = (u[k] - acc / static_cast<double>(k)) / u[0];
        jw[k] = static_cast<double>(k) * w[k];
    }
    return Series(std::move(w));
}

void sincos_series(const Series& u, std::vector<double>& s, std::vector<double>& c) {
    const auto ju = index_weighted(u);
    s.assign(u.size(), 0.0);
    c.assign(u.size(), 0.0);
    s[0] = std::sin(u[0]);
    c[0] = std::cos(u[0]);
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double kd = static_cast<double>(k);
        s[k] = tail_conv(ju, c, k) / kd;
        c[k] = -tail_conv(ju, s, k) / kd;
    }
}

Series reciprocal_series(const Series& u) {
    if (u[0] == 0.0) {
        throw DomainError("reciprocal: constant term is zero");
    }
    std::vector<double> w(u.size());
    w[0] = 1.0 / u[0];
    for (std::size_t k = 1; k < u.size(); ++k) {
        w[k] = -tail_conv(u.coeffs(), w, k) / u[0];
    }
    return Series(std::move(w));
}

bool is_nonneg_integer(double rho) {
    return rho >= 0.0 && rho <= 1024.0 && std::floor(rho) == rho;
}

Series int_pow(const Series& u, unsigned e) {
    Series result = Series::constant(1.0, u.order());
    Series base = u;
    bool first = true;
    while (e != 0) {
        if (e & 1U) {
            result = first ? base : mul(result, base);
            first = false;
        }
        e >>= 1U;
        if (e != 0) base = mul(base, base);
    }
    return result;
}

Series pow_series(const Series& u, double rho) {
    if (is_nonneg_integer(rho)) {
        return int_pow(u, static_cast<unsigned>(rho));
    }
    const bool integral = std::floor(rho) == rho;
    if (integral ? u[0] == 0.0 : !(u[0] > 0.0)) {
        throw DomainError("pow(" + fmt_real(rho) + "): constant term " + fmt_real(u[0]) +
                          (integral ? " is zero" : " is not positive"));
    }
    // u w' = rho u' w  =>  k u0 w_k = sum_{j=1}^{k} ((rho+1) j - k) u_j w_{k-j}
    const auto ju = index_weighted(u);
    std::vector<double> w(u.size());
    w[0] = std::pow(u[0], rho);
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double kd = static_cast<double>(k);
        const double weighted = tail_conv(ju, w, k);
        const double plain = tail_conv(u.coeffs(), w, k);
        w[k] = ((rho + 1.0) * weighted - kd * plain) / (kd * u[0]);
    }
    return Series(std::move(w));
}

} // namespace

Series::Series(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw std::invalid_argument("Series needs at least one coefficient");
    }
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (!std::isfinite(coeffs_[k])) {
            throw DomainError("non-finite series coefficient at k=" + std::to_string(k));
        }
    }
}

Series::Series(std::initializer_list<double> coeffs) : Series(std::vector<double>(coeffs)) {}

Series Series::zero(std::size_t order) { return Series(std::vector<double>(order + 1, 0.0)); }

Series Series::constant(double value, std::size_t order) {
    std::vector<double> c(order + 1, 0.0);
    c[0] = value;
    return Series(std::move(c));
}

Series Series::monomial(std::size_t degree, std::size_t order) {
    std::vector<double> c(order + 1, 0.0);
    if (degree <= order) c[degree] = 1.0;
    return Series(std::move(c));
}

Series Series::exp_linear(double lambda, std::size_t order) {
    std::vector<double> c(order + 1);
    c[0] = 1.0;
    for (std::size_t k = 1; k <= order; ++k) {
        c[k] = c[k - 1] * lambda / static_cast<double>(k);
    }
    return Series(std::move(c));
}

Series Series::prefix(std::size_t order) const {
    if (order > this->order()) {
        throw OrderMismatch("prefix: requested order " + std::to_string(order) + " exceeds available order " +
                            std::to_string(this->order()));
    }
    return Series(std::vector<double>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(order + 1)));
}

std::string_view name(Elementary kind) noexcept {
    switch (kind) {
    case Elementary::exp: return "exp";
    case Elementary::ln: return "ln";
    case Elementary::sin: return "sin";
    case Elementary::cos: return "cos";
    case Elementary::pow: return "pow";
    case Elementary::reciprocal: return "reciprocal";
    }
    return "?";
}

Series add(const Series& a, const Series& b) {
    require_same_order(a, b, "add");
    std::vector<double> out(a.size());
    simd::add(a.coeffs(), b.coeffs(), out);
    return Series(std::move(out));
}

Series sub(const Series& a, const Series& b) {
    require_same_order(a, b, "sub");
    std::vector<double> out(a.size());
    simd::sub(a.coeffs(), b.coeffs(), out);
    return Series(std::move(out));
}

Series negate(const Series& a) { return scalar_mul(-1.0, a); }

Series scalar_mul(double s, const Series& a) {
    std::vector<double> out(a.size());
    simd::scale(a.coeffs(), s, out);
    return Series(std::move(out));
}

Series mul(const Series& a, const Series& b) {
    require_same_order(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = simd::dot_reversed(a.coeffs().first(k + 1), b.coeffs().first(k + 1));
    }
    return Series(std::move(out));
}

Series scale_arg(const Series& u, double q) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw DomainError("scale_arg: factor " + fmt_real(q) + " outside (0, 1]");
    }
    std::vector<double> out(u.size());
    simd::scale_powers(u.coeffs(), q, out);
    return Series(std::move(out));
}

Series differentiate(const Series& u, std::size_t m) {
    if (m > u.order()) {
        throw OrderMismatch("differentiate: derivative order " + std::to_string(m) + " exceeds truncation order " +
                            std::to_string(u.order()));
    }
    std::vector<double> out(u.size() - m);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double falling = 1.0; // (k+m)!/k!
        for (std::size_t i = 1; i <= m; ++i) falling *= static_cast<double>(k + i);
        out[k] = falling * u[k + m];
    }
    return Series(std::move(out));
}

Series compose(ElementaryFn f, const Series& u) {
    switch (f.kind) {
    case Elementary::exp: return exp_series(u);
    case Elementary::ln: return ln_series(u);
    case Elementary::sin: {
        std::vector<double> s, c;
        sincos_series(u, s, c);
        return Series(std::move(s));
    }
    case Elementary::cos: {
        std::vector<double> s, c;
        sincos_series(u, s, c);
        return Series(std::move(c));
    }
    case Elementary::pow: return pow_series(u, f.exponent);
    case Elementary::reciprocal: return reciprocal_series(u);
    }
    throw std::invalid_argument("compose: unknown elementary function");
}

Series div(const Series& a, const Series& b) {
    require_same_order(a, b, "div");
    if (b[0] == 0.0) {
        throw DomainError("division by a series with zero constant term");
    }
    std::vector<double> w(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double acc = k == 0 ? 0.0 : tail_conv(b.coeffs(), w, k);
        w[k] = (a[k] - acc) / b[0];
    }
    return Series(std::move(w));
}

Series pow(const Series& u, double rho) { return pow_series(u, rho); }

Series substitute(const Series& outer, const Series& inner) {
    require_same_order(outer, inner, "substitute");
    if (inner[0] != 0.0) {
        throw DomainError("substitute: inner series must have a zero constant term, got " + fmt_real(inner[0]));
    }
    Series acc = Series::constant(outer[outer.order()], outer.order());
    for (std::size_t i = outer.order(); i-- > 0;) {
        acc = add(mul(acc, inner), Series::constant(outer[i], outer.order()));
    }
    return acc;
}

double evaluate(const Series& u, double t) noexcept {
    double acc = 0.0;
    for (std::size_t k = u.size(); k-- > 0;) {
        acc = acc * t + u[k];
    }
    return acc;
}

std::vector<double> evaluate_many(const Series& u, std::span<const double> t) {
    std::vector<double> out(t.size());
    simd::horner_many(u.coeffs(), t, out);
    return out;
}

} // namespace dtm
