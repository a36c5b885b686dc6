#include <dtm/simd.hpp>

#include <atomic>
#include <cassert>
#include <stdexcept>
#include <string>

namespace dtm::simd {
namespace {

std::atomic<const KernelTable*> active_table{nullptr};
std::atomic<Backend> active_kind{Backend::scalar};

const KernelTable& ensure_active() noexcept {
    const KernelTable* t = active_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        const Backend b = detect_backend();
        t = &kernels_for(b);
        active_kind.store(b, std::memory_order_relaxed);
        active_table.store(t, std::memory_order_release);
    }
    return *t;
}

} // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_available(Backend b) noexcept {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2:
#if defined(DTM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Backend detect_backend() noexcept {
    return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() noexcept {
    ensure_active();
    return active_kind.load(std::memory_order_relaxed);
}

void select_backend(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
    }
    active_kind.store(b, std::memory_order_relaxed);
    active_table.store(&kernels_for(b), std::memory_order_release);
}

const KernelTable& kernels_for(Backend b) {
    switch (b) {
    case Backend::scalar: return detail::scalar_table();
    case Backend::avx2:
#if defined(DTM_HAVE_AVX2)
        return detail::avx2_table();
#else
        break;
#endif
    }
    throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) + "' was not compiled in");
}

const KernelTable& kernels() noexcept { return ensure_active(); }

double dot_reversed(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return kernels().dot_reversed(a.data(), b.data(), a.size());
}

void scale_powers(std::span<const double> in, double q, std::span<double> out) {
    assert(in.size() == out.size());
    kernels().scale_powers(in.data(), q, out.data(), in.size());
}

void horner_many(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
    assert(t.size() == out.size());
    kernels().horner_many(coeffs.data(), coeffs.size(), t.data(), out.data(), t.size());
}

void add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    kernels().add(a.data(), b.data(), out.data(), a.size());
}

void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    kernels().sub(a.data(), b.data(), out.data(), a.size());
}

void scale(std::span<const double> a, double s, std::span<double> out) {
    assert(a.size() == out.size());
    kernels().scale(a.data(), s, out.data(), a.size());
}

} // namespace dtm::simd
