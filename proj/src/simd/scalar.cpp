#include <dtm/simd.hpp>

namespace dtm::simd::detail {
namespace {

double dot_reversed_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[n - 1 - i];
    }
    return acc;
}

void scale_powers_scalar(const double* in, double q, double* out, std::size_t n) {
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = p * in[k];
        p *= q;
    }
}

void horner_many_scalar(const double* c, std::size_t nc, const double* t, double* out, std::size_t nt) {
    for (std::size_t i = 0; i < nt; ++i) {
        double acc = 0.0;
        for (std::size_t k = nc; k-- > 0;) {
            acc = acc * t[i] + c[k];
        }
        out[i] = acc;
    }
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_scalar(const double* a, double s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i];
}

constexpr KernelTable table{
    dot_reversed_scalar, scale_powers_scalar, horner_many_scalar, add_scalar, sub_scalar, scale_scalar,
};

} // namespace

const KernelTable& scalar_table() noexcept { return table; }

} // namespace dtm::simd::detail
