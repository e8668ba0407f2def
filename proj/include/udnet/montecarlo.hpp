#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "udnet/kernels.hpp"
#include "udnet/lie_core.hpp"

namespace udnet {

using CMatrix = Eigen::MatrixXcd;

// mt19937_64 seeded from (seed, stream_id); substreams are independent.
class RngStream {
public:
    RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    RngStream substream(std::uint64_t index) const;

    double uniform();  // [0, 1)
    double normal();   // standard normal
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Samples are processed in fixed-size chunks, chunk c drawing from
// rng.substream(c); chunk results are merged in chunk order, so the estimate
// does not depend on the thread count.
inline constexpr std::size_t kMcChunk = 4096;

CMatrix sample_haar_su(int d, RngStream& rng);
CMatrix sample_gue_traceless(int d, RngStream& rng);

// Eigenphases of a unitary matrix.
std::vector<double> unitary_eigenphases(const CMatrix& u);
// Torus point of an SU(d) matrix (from its eigenphases).
TorusPoint torus_point_of(const CMatrix& u);

double unitarity_defect(const CMatrix& u);
double projective_distance(const CMatrix& u, const CMatrix& v);
// d_P(U, I) from the eigenphases of U.
double projective_distance_to_identity(const std::vector<double>& theta);
// ||U - I|| from the eigenphases of U.
double su_distance_to_identity(const std::vector<double>& theta);

McEstimate gue_tail_mc(int d, double r, std::size_t n, const RngStream& rng);
McEstimate mc_normalization(int d, double sigma, std::optional<int> trim_t, std::size_t n, const RngStream& rng);
// Mass of |H_P^(t)| outside the projective eps-ball; t defaults to ceil(t_*).
McEstimate mc_outside_ball(int d, double sigma, std::optional<int> trim_t, double eps, std::size_t n,
                           const RngStream& rng);
// Untrimmed variants used for the ball-comparison lemma.
McEstimate mc_pu_outside_projective_ball(int d, double sigma, double eps, std::size_t n, const RngStream& rng);
McEstimate mc_su_outside_ball(int d, double sigma, double eps, std::size_t n, const RngStream& rng);

// Haar average of f(U) over SU(d).
McEstimate mc_haar_average(int d, std::size_t n, const RngStream& rng, const std::function<double(const CMatrix&)>& f);

// Weyl-integration trapezoidal rule on [-pi, pi)^{d-1}; d in {2, 3}.
double torus_quadrature(int d, int grid_n, const std::function<double(const TorusPoint&)>& f);
std::complex<double> torus_quadrature_complex(int d, int grid_n,
                                              const std::function<std::complex<double>(const TorusPoint&)>& f);

// Direct quadrature of the dominant term I0 (midpoint rule, log space).
double numeric_I0_log(int d, double sigma, double eps, int grid_n);
double numeric_I0(int d, double sigma, double eps, int grid_n);

// P(||A|| <= r) for traceless GUE, d = 2, from the constrained eigenvalue density.
double gue0_probability_d2(double r);

namespace reference {
double torus_quadrature_serial(int d, int grid_n, const std::function<double(const TorusPoint&)>& f);
McEstimate gue_tail_mc_serial(int d, double r, std::size_t n, const RngStream& rng);
McEstimate mc_outside_ball_serial(int d, double sigma, std::optional<int> trim_t, double eps, std::size_t n,
                                  const RngStream& rng);
}  // namespace reference

}  // namespace udnet
