#pragma once

// Data-parallel inner loops of the series algebra. Every kernel has a scalar
// reference implementation; wider variants are picked at runtime from what the
// CPU reports and must agree with the reference to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace dtm::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
    // sum_{i<n} a[i] * b[n-1-i]
    double (*dot_reversed)(const double* a, const double* b, std::size_t n);
    // out[k] = q^k * in[k]
    void (*scale_powers)(const double* in, double q, double* out, std::size_t n);
    // out[i] = sum_k c[k] * t[i]^k
    void (*horner_many)(const double* c, std::size_t nc, const double* t, double* out, std::size_t nt);
    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*scale)(const double* a, double s, double* out, std::size_t n);
};

std::string_view backend_name(Backend b) noexcept;
bool backend_available(Backend b) noexcept;

/// Best backend the running CPU supports.
Backend detect_backend() noexcept;

Backend active_backend() noexcept;

/// Overrides the automatic choice; throws std::invalid_argument when the
/// backend is not available on this machine.
void select_backend(Backend b);

const KernelTable& kernels_for(Backend b);
const KernelTable& kernels() noexcept;

// Span front-ends over the active table.
double dot_reversed(std::span<const double> a, std::span<const double> b);
void scale_powers(std::span<const double> in, double q, std::span<double> out);
void horner_many(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);
void add(std::span<const double> a, std::span<const double> b, std::span<double> out);
void sub(std::span<const double> a, std::span<const double> b, std::span<double> out);
void scale(std::span<const double> a, double s, std::span<double> out);

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(DTM_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
} // namespace detail

} // namespace dtm::simd
