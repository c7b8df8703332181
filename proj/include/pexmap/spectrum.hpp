#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pexmap/map.hpp"
#include "pexmap/sequences.hpp"

namespace pexmap {

// Row-stochastic Ulam matrix on the n x n cell grid over (0,1) x (-1,1),
// cell (ix, iy) -> index ix*n + iy. Entries are counts / s^2, so every row
// sums to 1 exactly in binary floating point.
struct UlamOperator {
    int n = 0, s = 0;
    uint64_t seed = 0;
    bool skeleton = false;
    std::vector<int64_t> rowptr;
    std::vector<int> col;
    std::vector<double> val;

    int ncells() const { return n * n; }
    int cell_of(double x, double y) const;
};

UlamOperator build_ulam(const MapModel& map, int n, int s, uint64_t seed);

struct SpectralData {
    int n = 0;
    std::vector<std::complex<double>> eigenvalues;  // by decreasing modulus
    std::vector<double> residuals;                  // ||v P - lambda v||_1 per pair
    std::vector<double> density;                    // left unit eigenvector, sums to 1
    int iterations = 0;
};

// Leading left eigenpairs by power iteration plus deflated block iteration
// with Schur locking (count <= 10); throws NoConvergence if the L1 residual
// of any requested pair has not reached tol.
SpectralData leading_spectrum(const UlamOperator& P, int count, double tol);

struct SupportInfo {
    double threshold = 0.0;  // relative to the density maximum
    int q_hat = 0;
    std::vector<char> mask;                 // ncells flags
    std::vector<std::vector<int>> components;
};

SupportInfo acim_supports(const SpectralData& sd, double threshold);

enum class InitialSet { UniformD, WanderingRectangle };

struct HitStats {
    int samples = 0;
    int64_t horizon = 0;
    std::vector<int64_t> first_hit;  // -1 = no hit within horizon (or escaped)
    std::vector<std::pair<int64_t, double>> fraction_by_horizon;
    double hit_fraction = 0.0;       // at the full horizon
};

HitStats hit_time_stats(const MapModel& map, const SequenceTable& tab, InitialSet init,
                        int m_init, const SupportInfo& support, int grid_n,
                        const std::vector<int64_t>& horizons, int samples, uint64_t seed);

}  // namespace pexmap
