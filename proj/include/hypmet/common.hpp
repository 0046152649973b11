#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace hypmet {

/// Error with a machine-readable kind tag ("degenerate-quadruple",
/// "insufficient-sampling", ...) in addition to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

/// Dense symmetric-capable square matrix, row major.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    double max_entry() const {
        double m = 0.0;
        for (double v : a_)
            if (v > m) m = v;
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// splitmix64: the documented generator for every seeded stream in this
/// library. Fixtures and sampled scans are reproducible from the seed alone.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in {0, ..., bound-1}, bound > 0. Rejection-free modulo is fine
    /// for our budgets (bias < 2^-40 for bound < 2^24).
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

private:
    std::uint64_t state_;
};

/// Runs f(begin, end) over a partition of [0, n) on up to `threads` workers.
/// Chunk boundaries are deterministic; callers own the reduction.
template <class F>
void parallel_chunks(std::size_t n, unsigned threads, F&& f) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (n == 0) return;
    if (threads > n) threads = unsigned(n);
    if (threads == 1) {
        f(std::size_t(0), n, unsigned(0));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t b = std::size_t(t) * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&f, b, e, t] { f(b, e, t); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hypmet
