#pragma once

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace ddc::fft {

/// Batched 1-D real-to-complex FFT along the fastest (x) index of a
/// row-major (rows, nx) array. Plans are created once with
/// FFTW_ESTIMATE | FFTW_UNALIGNED so execution is deterministic and
/// reentrant on caller-owned buffers.
class RowFft {
  public:
    RowFft(int nx, int rows) : nx_(nx), rows_(rows) {
        if (nx < 2 || rows < 1)
            throw std::invalid_argument("RowFft: bad shape");
        std::vector<double> rbuf(static_cast<std::size_t>(nx) * rows);
        std::vector<std::complex<double>> cbuf(static_cast<std::size_t>(spectral_size()) * rows);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_many_dft_r2c(1, &nx_, rows_,
                                      rbuf.data(), nullptr, 1, nx_,
                                      reinterpret_cast<fftw_complex*>(cbuf.data()), nullptr, 1, spectral_size(),
                                      flags);
        inv_ = fftw_plan_many_dft_c2r(1, &nx_, rows_,
                                      reinterpret_cast<fftw_complex*>(cbuf.data()), nullptr, 1, spectral_size(),
                                      rbuf.data(), nullptr, 1, nx_,
                                      flags);
        if (!fwd_ || !inv_)
            throw std::runtime_error("RowFft: fftw plan creation failed");
    }
    ~RowFft() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    RowFft(const RowFft&) = delete;
    RowFft& operator=(const RowFft&) = delete;

    int nx() const { return nx_; }
    int rows() const { return rows_; }
    int spectral_size() const { return nx_ / 2 + 1; }

    /// Unnormalised forward transform, in: (rows, nx), out: (rows, nx/2+1).
    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }
    /// Inverse transform, normalised by 1/nx. Destroys `in`.
    void inverse(std::complex<double>* in, double* out) const {
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
        const double s = 1.0 / nx_;
        for (std::size_t i = 0, n = static_cast<std::size_t>(nx_) * rows_; i < n; ++i)
            out[i] *= s;
    }

  private:
    int nx_, rows_;
    fftw_plan fwd_, inv_;
};

/// 2-D real-to-complex FFT for row-major (nz, nx) doubly periodic data.
class Fft2 {
  public:
    Fft2(int nx, int nz) : nx_(nx), nz_(nz) {
        if (nx < 2 || nz < 2)
            throw std::invalid_argument("Fft2: bad shape");
        std::vector<double> rbuf(static_cast<std::size_t>(nx) * nz);
        std::vector<std::complex<double>> cbuf(static_cast<std::size_t>(spectral_nx()) * nz);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_2d(nz_, nx_, rbuf.data(),
                                    reinterpret_cast<fftw_complex*>(cbuf.data()), flags);
        inv_ = fftw_plan_dft_c2r_2d(nz_, nx_, reinterpret_cast<fftw_complex*>(cbuf.data()),
                                    rbuf.data(), flags);
        if (!fwd_ || !inv_)
            throw std::runtime_error("Fft2: fftw plan creation failed");
    }
    ~Fft2() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    int nx() const { return nx_; }
    int nz() const { return nz_; }
    int spectral_nx() const { return nx_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }
    /// Normalised by 1/(nx*nz). Destroys `in`.
    void inverse(std::complex<double>* in, double* out) const {
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
        const double s = 1.0 / (static_cast<double>(nx_) * nz_);
        for (std::size_t i = 0, n = static_cast<std::size_t>(nx_) * nz_; i < n; ++i)
            out[i] *= s;
    }

  private:
    int nx_, nz_;
    fftw_plan fwd_, inv_;
};

// Plan caches. FFTW plan creation is not reentrant, so caches are
// thread_local; execution through a cached plan is pure.
inline const RowFft& row_fft(int nx, int rows) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<RowFft>> cache;
    auto& slot = cache[{nx, rows}];
    if (!slot)
        slot = std::make_unique<RowFft>(nx, rows);
    return *slot;
}

inline const Fft2& fft2(int nx, int nz) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Fft2>> cache;
    auto& slot = cache[{nx, nz}];
    if (!slot)
        slot = std::make_unique<Fft2>(nx, nz);
    return *slot;
}

} // namespace ddc::fft
