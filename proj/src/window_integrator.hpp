// window_integrator.hpp — running Simpson integral with block-wise settling test
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace ptwalk::detail {

// Accumulates \int f dt over uniformly spaced samples, one Simpson block at a
// time. A block spans `window` time units (rounded to an even interval count so
// the composite rule applies cleanly). After each block the caller can ask
// whether the integral has settled: the last block contributed less than
// tol * max(1, |total|) AND the decay-envelope bound on the remaining tail is
// below the same threshold. The tail bound assumes |f| decays at least as fast
// as exp(-2*margin*(t - t_last)) from its last-block peak, which holds whenever
// the sampled integrand carries an explicit exp(-2*gamma*t) weight and the
// unweighted signal grows no faster than exp(+2*(gamma-margin)*t).
// When `self_measure` is set the decay rate is estimated from the ratio of
// consecutive block peaks instead (still capped by `margin`), for integrands
// whose growth rate is not known a priori (nonlinear evolution).
class WindowIntegrator {
public:
    WindowIntegrator(double dt, double window, double tol, double margin,
                     bool self_measure = false)
        : dt_(dt), tol_(tol), margin_(margin), self_measure_(self_measure) {
        std::size_t half = static_cast<std::size_t>(std::ceil(window / (2.0 * dt)));
        if (half < 2) half = 2;
        block_intervals_ = 2 * half;
    }

    // Feed the next sample; returns true if the integral has settled and no
    // further samples are needed.
    bool add(double f) {
        if (settled_) return true;
        buf_.push_back(f);
        ++samples_seen_;
        if (buf_.size() == block_intervals_ + 1) {
            close_block();
            const double carry = buf_.back();  // end point opens the next block
            buf_.assign(1, carry);
        }
        return settled_;
    }

    // Finish a partial block with the plain trapezoid rule (used when the
    // sample stream ends before the settling test fires).
    void flush() {
        for (std::size_t i = 0; i + 1 < buf_.size(); ++i)
            total_ += 0.5 * dt_ * (buf_[i] + buf_[i + 1]);
        if (!buf_.empty()) track_peak();
        buf_.clear();
    }

    double total() const { return total_; }
    bool settled() const { return settled_; }
    double elapsed() const { return samples_seen_ ? dt_ * static_cast<double>(samples_seen_ - 1) : 0.0; }

    // Bound on the neglected tail; infinite when the envelope does not decay.
    double tail_bound() const {
        if (last_peak_ == 0.0) return 0.0;
        double margin = margin_;
        if (self_measure_) {
            double measured = 0.0;
            if (prev_peak_ > 0.0 && last_peak_ < prev_peak_)
                measured = std::log(prev_peak_ / last_peak_) /
                           (2.0 * dt_ * static_cast<double>(block_intervals_));
            margin = std::min(margin, measured);
        }
        if (margin <= 0.0) return std::numeric_limits<double>::infinity();
        return last_peak_ / (2.0 * margin);
    }

    double last_block_value() const { return last_block_; }
    double last_peak() const { return last_peak_; }

private:
    void track_peak() {
        prev_peak_ = last_peak_;
        last_peak_ = 0.0;
        for (double f : buf_) last_peak_ = std::max(last_peak_, std::abs(f));
    }

    void close_block() {
        double sum = buf_.front() + buf_.back();
        for (std::size_t i = 1; i < block_intervals_; ++i) sum += (i % 2 ? 4.0 : 2.0) * buf_[i];
        last_block_ = dt_ / 3.0 * sum;
        total_ += last_block_;
        track_peak();
        const double scale = tol_ * std::max(1.0, std::abs(total_));
        settled_ = std::abs(last_block_) <= scale && tail_bound() <= scale;
    }

    double dt_;
    double tol_;
    double margin_;
    bool self_measure_;
    std::size_t block_intervals_;
    std::vector<double> buf_;
    std::size_t samples_seen_ = 0;
    double total_ = 0.0;
    double last_block_ = 0.0;
    double last_peak_ = 0.0;
    double prev_peak_ = 0.0;
    bool settled_ = false;
};

}  // namespace ptwalk::detail
