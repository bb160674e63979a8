#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sws::models {

// Deterministic generator (splitmix64 core) so runs reproduce across
// platforms regardless of the standard library's distribution details.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // rejection sampling keeps the draw exactly uniform
    std::size_t uniform_below(std::size_t n);

    double normal(double sd);

  private:
    std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a_bytes(const void* data, std::size_t size);

// Shared initial-training knobs for the bundled model backends.
struct PretrainOptions {
    std::size_t epochs = 20;
    double learning_rate = 1e-2;
    double dropout_rate = 0.0;
    std::uint64_t seed = 1;
};

// Adam on a flat parameter vector; every model keeps its weights flattened so
// optimization, clipping, hashing and serialization all work on one buffer.
class Adam {
  public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  private:
    double lr_, beta1_, beta2_, eps_;
    Eigen::VectorXd m_, v_;
    long t_ = 0;
};

// Scales grad down to max_norm when it exceeds it; returns the pre-clip norm.
double clip_global_norm(Eigen::VectorXd& grad, double max_norm);

// Little-endian binary checkpoint primitives.
void write_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_u64(std::istream& is);
void write_string(std::ostream& os, std::string_view s);
std::string read_string(std::istream& is);
void write_vector(std::ostream& os, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(std::istream& is);

}  // namespace sws::models
