#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace dtm {

/// Truncated Taylor series about 0. Entry k is the coefficient of t^k, i.e. the
/// differential transform U(k) = u^(k)(0) / k!. A series of order N holds N+1
/// finite coefficients; operations never pad or re-truncate implicitly.
class Series {
public:
    explicit Series(std::vector<double> coeffs);
    Series(std::initializer_list<double> coeffs);

    static Series zero(std::size_t order);
    static Series constant(double value, std::size_t order);
    /// t^degree; all zeros when degree exceeds the order.
    static Series monomial(std::size_t degree, std::size_t order);
    /// e^{lambda t}: coefficients lambda^k / k!.
    static Series exp_linear(double lambda, std::size_t order);

    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t k) const noexcept { return coeffs_[k]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    /// Explicit truncation to a lower (or equal) order.
    Series prefix(std::size_t order) const;

    bool operator==(const Series&) const = default;

private:
    std::vector<double> coeffs_;
};

enum class Elementary { exp, ln, sin, cos, pow, reciprocal };

struct ElementaryFn {
    Elementary kind;
    double exponent = 0.0; // pow only

    static constexpr ElementaryFn power(double rho) noexcept { return {Elementary::pow, rho}; }
};

std::string_view name(Elementary kind) noexcept;

Series add(const Series& a, const Series& b);
Series sub(const Series& a, const Series& b);
Series negate(const Series& a);
Series scalar_mul(double s, const Series& a);

/// Cauchy product; both operands must have the same order.
Series mul(const Series& a, const Series& b);

/// w(t) = u(q t): coefficients q^k u[k]. Requires 0 < q <= 1.
Series scale_arg(const Series& u, double q);

/// m-th derivative: (k+m)!/k! u[k+m]. The result has order N-m.
Series differentiate(const Series& u, std::size_t m);

/// Taylor coefficients of f(u(t)) by the usual first-order recurrences; entry k
/// depends only on u[0..k]. Throws DomainError when u[0] is outside the domain.
Series compose(ElementaryFn f, const Series& u);

/// a / b; b[0] must be non-zero.
Series div(const Series& a, const Series& b);

/// u^rho. Non-negative integer exponents use repeated squaring and accept any
/// u[0]; everything else goes through the pow recurrence.
Series pow(const Series& u, double rho);

/// outer(inner(t)) where inner[0] == 0, evaluated by Horner over series.
/// Both operands must have the same order.
Series substitute(const Series& outer, const Series& inner);

/// Horner evaluation of the truncated polynomial.
double evaluate(const Series& u, double t) noexcept;

/// Evaluates at many points using the active SIMD backend.
std::vector<double> evaluate_many(const Series& u, std::span<const double> t);

inline Series operator+(const Series& a, const Series& b) { return add(a, b); }
inline Series operator-(const Series& a, const Series& b) { return sub(a, b); }
inline Series operator-(const Series& a) { return negate(a); }
inline Series operator*(const Series& a, const Series& b) { return mul(a, b); }
inline Series operator*(double s, const Series& a) { return scalar_mul(s, a); }

} // namespace dtm
