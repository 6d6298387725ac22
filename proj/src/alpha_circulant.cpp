#include "pintlcp/alpha_circulant.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

namespace pintlcp {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

TimeFft::TimeFft(std::size_t nt, std::size_t ns) : nt_(nt), ns_(ns) {
    if (nt == 0 || ns == 0) throw std::invalid_argument("TimeFft: sizes must be positive");
    std::vector<Complex> scratch(nt * ns);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n[] = {static_cast<int>(nt)};
    const int howmany = static_cast<int>(ns);
    const int stride = static_cast<int>(ns);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_many_dft(1, n, howmany, buf, nullptr, stride, 1, buf, nullptr, stride, 1,
                                       FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_many_dft(1, n, howmany, buf, nullptr, stride, 1, buf, nullptr, stride, 1,
                                        FFTW_BACKWARD, flags);
    if (!forward_plan_ || !backward_plan_) throw std::runtime_error("TimeFft: FFTW planning failed");
}

TimeFft::~TimeFft() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void TimeFft::run(void* plan, std::span<Complex> data) const {
    if (data.size() != nt_ * ns_) throw std::invalid_argument("TimeFft: data length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan), buf, buf);
    const double norm = 1.0 / std::sqrt(static_cast<double>(nt_));
    for (auto& x : data) x *= norm;
}

void TimeFft::forward(std::span<Complex> data) const { run(forward_plan_, data); }
void TimeFft::backward(std::span<Complex> data) const { run(backward_plan_, data); }

ConjugatePairPlan conjugate_pair_plan(std::size_t nt) {
    if (nt == 0) throw std::invalid_argument("conjugate_pair_plan: nt must be positive");
    ConjugatePairPlan plan;
    const std::size_t solved = (nt + 2) / 2;  // ceil((nt + 1) / 2)
    for (std::size_t k = 0; k < solved; ++k) plan.solve.push_back(k);
    for (std::size_t k = solved; k < nt; ++k) plan.mirror.emplace_back(k, nt - k);
    return plan;
}

std::vector<Complex> alpha_circulant_eigenvalues(double alpha, std::size_t nt, double tau) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie strictly inside (0, 1)");
    if (nt == 0) throw std::invalid_argument("nt must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const double root = std::pow(alpha, 1.0 / static_cast<double>(nt));
    std::vector<Complex> lambda(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nt);
        lambda[k] = (1.0 - root * std::polar(1.0, angle)) / tau;
    }
    return lambda;
}

AlphaCirculant::AlphaCirculant(double alpha, std::size_t nt, double tau)
    : alpha_(alpha), nt_(nt), tau_(tau), eigenvalues_(alpha_circulant_eigenvalues(alpha, nt, tau)),
      scaling_(nt) {
    for (std::size_t j = 0; j < nt; ++j) {
        scaling_[j] = std::pow(alpha, static_cast<double>(j) / static_cast<double>(nt));
    }
    residue_tol_ = std::max(1e-10, 1e3 * std::numeric_limits<double>::epsilon() / alpha);
    if (alpha < 1e-12) {
        std::clog << "warning: alpha = " << alpha
                  << " is below 1e-12; the scaled transforms lose accuracy in double precision\n";
    }
}

std::vector<Complex> AlphaCirculant::step_a(std::span<const double> r, const TimeFft& fft) const {
    std::vector<Complex> z(r.begin(), r.end());
    return step_a(std::span<const Complex>(z), fft);
}

std::vector<Complex> AlphaCirculant::step_a(std::span<const Complex> r, const TimeFft& fft) const {
    if (fft.nt() != nt_ || r.size() != fft.nt() * fft.ns()) throw std::invalid_argument("step_a: size mismatch");
    const std::size_t ns = fft.ns();
    std::vector<Complex> z(r.size());
    for (std::size_t j = 0; j < nt_; ++j) {
        for (std::size_t i = 0; i < ns; ++i) z[j * ns + i] = scaling_[j] * r[j * ns + i];
    }
    fft.forward(z);
    return z;
}

std::vector<Complex> AlphaCirculant::step_c_complex(std::span<const Complex> z, const TimeFft& fft) const {
    if (fft.nt() != nt_ || z.size() != fft.nt() * fft.ns()) throw std::invalid_argument("step_c: size mismatch");
    const std::size_t ns = fft.ns();
    std::vector<Complex> w(z.begin(), z.end());
    fft.backward(w);
    for (std::size_t j = 0; j < nt_; ++j) {
        const double inv = 1.0 / scaling_[j];
        for (std::size_t i = 0; i < ns; ++i) w[j * ns + i] *= inv;
    }
    return w;
}

std::vector<double> AlphaCirculant::step_c(std::span<const Complex> z, const TimeFft& fft) const {
    const auto w = step_c_complex(z, fft);
    std::vector<double> out(w.size());
    double max_abs = 0.0;
    double max_imag = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        out[k] = w[k].real();
        max_abs = std::max(max_abs, std::abs(w[k]));
        max_imag = std::max(max_imag, std::abs(w[k].imag()));
    }
    if (max_imag > residue_tol_ * max_abs + std::numeric_limits<double>::min()) {
        throw ImaginaryResidueError("step_c: imaginary residue " + std::to_string(max_imag) +
                                    " exceeds tolerance for output magnitude " + std::to_string(max_abs));
    }
    return out;
}

}  // namespace pintlcp
