#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "glmf/linked_model.hpp"

namespace glmf::sim {

struct SimulationConfig {
    double sigma = 0.3;      // component standard deviation
    int nmax = 16;           // trials drawn uniformly from 1..nmax
    int rank = 1;
    Index m1 = 200, n1 = 200, m2 = 50, n2 = 50;
    double error_variance = 0.09;    // Gaussian noise variance on Y and Z
    double missing_fraction = 0.20;  // uniformly masked X cells
    std::uint64_t seed = 0;
};

struct SimulatedTruth {
    Matrix p_true;  // inverse logit of theta_X
    Matrix theta_X, theta_Y, theta_Z;
    Matrix U, V, U_y, V_z;
    Matrix N;
    Mask mask;
};

// Draws components ~ N(0, sigma^2), builds the natural parameters, samples
// X ~ Bin(N, p), Y and Z ~ N(Theta, error_variance), then masks exactly
// round(missing_fraction * m1 * n1) X cells. Fully determined by the seed.
std::pair<LinkedDataset, SimulatedTruth> generate(const SimulationConfig& cfg);

struct GridSpec {
    std::vector<double> sigmas{0.1, 0.3, 0.5, 0.7};
    std::vector<int> nmaxes{1, 2, 8, 16};
    std::vector<int> ranks{1, 2, 3};
    int replicates = 3;
    SimulationConfig base;  // dims, noise, missingness, master seed
};

struct GridCell {
    double sigma = 0.0;
    int nmax = 0;
    int rank = 0;
    int replicate = 0;
    std::uint64_t seed = 0;  // derived from the master seed and the cell path
};

// All (sigma, nmax, rank, replicate) cells with per-cell derived seeds; the
// paper grid with 3 replicates yields 144 cells.
std::vector<GridCell> grid(const GridSpec& spec);

// The base configuration specialized to one grid cell.
SimulationConfig cell_config(const GridSpec& spec, const GridCell& cell);

}  // namespace glmf::sim
