#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "udnet/montecarlo.hpp"

namespace udnet {

inline constexpr std::size_t kDefaultMomentCap = 4096;

struct WeightedGate {
    double weight = 0.0;
    CMatrix matrix;
};

// Finitely supported probability measure on U(d).
class WeightedGateSet {
public:
    WeightedGateSet(int d, std::vector<WeightedGate> elements);

    int d() const { return d_; }
    const std::vector<WeightedGate>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }

    // Uniform measure on the given unitaries.
    static WeightedGateSet uniform(int d, const std::vector<CMatrix>& gates);

    static WeightedGateSet from_json(const nlohmann::json& j);
    static WeightedGateSet load(const std::string& path);
    nlohmann::json to_json() const;
    void save(const std::string& path) const;

private:
    int d_;
    std::vector<WeightedGate> elements_;
};

struct MomentOperator {
    int d = 0;
    int t = 0;
    CMatrix matrix;  // d^{2t} x d^{2t}, row-major vectorization
};

// d^{2t}, or ResourceLimit if it exceeds cap.
std::size_t moment_dimension(int d, int t, std::size_t cap = kDefaultMomentCap);

// Orthogonal projector onto the span of vectorized permutation operators.
MomentOperator haar_moment_projector(int d, int t, std::size_t cap = kDefaultMomentCap);
MomentOperator measure_moment(const WeightedGateSet& nu, int t, std::size_t cap = kDefaultMomentCap);

// Spectral norm of T_nu - T_haar, by power iteration on D^dagger D.
double delta_design(const WeightedGateSet& nu, int t, std::size_t cap = kDefaultMomentCap, std::uint64_t seed = 0);
// Same quantity from a dense SVD; used as a cross-check.
double delta_design_dense(const WeightedGateSet& nu, int t, std::size_t cap = kDefaultMomentCap);

struct NetProbe {
    McEstimate covered;  // Haar fraction within eps of the support
    // largest nearest-support distance among uncovered probes (0 if all covered)
    double worst_distance = 0.0;
};
NetProbe net_probe(const std::vector<CMatrix>& support, double eps, std::size_t n, const RngStream& rng);

std::vector<CMatrix> pauli_gates();
// Single-qubit Clifford group modulo phases (24 elements), generated from H and S.
std::vector<CMatrix> clifford24_gates();

namespace reference {
MomentOperator measure_moment_serial(const WeightedGateSet& nu, int t, std::size_t cap = kDefaultMomentCap);
}

}  // namespace udnet
