// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <dtm/simd.hpp>

#include <immintrin.h>

namespace dtm::simd::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_reversed_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    // b is walked backwards: lanes of the load at b[n-4-i] are reversed.
    for (; i + 8 <= n; i += 8) {
        __m256d va0 = _mm256_loadu_pd(a + i);
        __m256d vb0 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + n - 4 - i), 0x1B);
        __m256d va1 = _mm256_loadu_pd(a + i + 4);
        __m256d vb1 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + n - 8 - i), 0x1B);
        acc0 = _mm256_fmadd_pd(va0, vb0, acc0);
        acc1 = _mm256_fmadd_pd(va1, vb1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_permute4x64_pd(_mm256_loadu_pd(b + n - 4 - i), 0x1B);
        acc0 = _mm256_fmadd_pd(va, vb, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i] * b[n - 1 - i];
    }
    return acc;
}

void scale_powers_avx2(const double* in, double q, double* out, std::size_t n) {
    const double q2 = q * q;
    const double q3 = q2 * q;
    const double q4 = q2 * q2;
    __m256d pw = _mm256_setr_pd(1.0, q, q2, q3);
    const __m256d step = _mm256_set1_pd(q4);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, _mm256_mul_pd(pw, _mm256_loadu_pd(in + k)));
        pw = _mm256_mul_pd(pw, step);
    }
    alignas(32) double tail[4];
    _mm256_store_pd(tail, pw);
    for (std::size_t j = 0; k < n; ++k, ++j) {
        out[k] = tail[j] * in[k];
    }
}

void horner_many_avx2(const double* c, std::size_t nc, const double* t, double* out, std::size_t nt) {
    std::size_t i = 0;
    for (; i + 4 <= nt; i += 4) {
        const __m256d vt = _mm256_loadu_pd(t + i);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = nc; k-- > 0;) {
            acc = _mm256_fmadd_pd(acc, vt, _mm256_set1_pd(c[k]));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < nt; ++i) {
        double acc = 0.0;
        for (std::size_t k = nc; k-- > 0;) {
            acc = acc * t[i] + c[k];
        }
        out[i] = acc;
    }
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_avx2(const double* a, double s, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) out[i] = s * a[i];
}

constexpr KernelTable table{
    dot_reversed_avx2, scale_powers_avx2, horner_many_avx2, add_avx2, sub_avx2, scale_avx2,
};

} // namespace

const KernelTable& avx2_table() noexcept { return table; }

} // namespace dtm::simd::detail
