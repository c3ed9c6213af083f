#pragma once

#include <map>
#include <utility>
#include <vector>

#include "treelimit/hyperboloid.hpp"
#include "treelimit/representation.hpp"

namespace treelimit {

// Directed edge with a holonomy word; the energy term couples the tail
// position to the holonomy-transported head position.
struct TwistedEdge {
    int tail = 0;
    int head = 0;
    double weight = 1.0;
    Word holonomy;
};

// Finite weighted multigraph (loops allowed), connected as an undirected
// graph; the discrete stand-in for the quotient manifold.
struct TwistedGraph {
    int vertex_count = 0;
    std::vector<TwistedEdge> edges;
};

void validate_graph(const TwistedGraph& g);

// One point of H^3 per vertex.
struct EquivariantMap {
    std::vector<Vec4> positions;
};

EquivariantMap default_initial_map(const TwistedGraph& g);

enum class SolveStatus { Converged, MaxIterations, Escaped };

struct SolveReport {
    double final_energy = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<double> energy_trace;
};

// E(u) = sum_e w_e d(u(tail), rho(h_e) u(head))^2
double energy(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u);

// Gradient at v: -2 sum over incident edge slots of
// w_e log_map(u(v), transported opposite endpoint); loop edges contribute
// through both slots, the head slot transporting by the inverse isometry.
std::vector<Vec4> energy_gradient(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u);

// Gradient descent with Armijo backtracking (first trial step 1.0, shrink
// 0.5, sufficient decrease 1e-4), positions reprojected to the hyperboloid
// each step; falls back to Jacobi sweeps of vertex-wise Karcher means when
// the line search stalls.
std::pair<EquivariantMap, SolveReport> minimize(const TwistedGraph& g, const Representation& rep,
                                                const EquivariantMap& init, double tol, int max_iter);

// max over edges of (distortion^2 / weight) / total energy
double lipschitz_ratio(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u);

// Sample label: the orbit point rho(word) u(vertex).
struct SampleLabel {
    int vertex = 0;
    Word word;
};

std::vector<SampleLabel> sample_labels(const TwistedGraph& g, const std::vector<Word>& words);

// Matrix of pairwise distances between the (vertex, word) orbit samples,
// computed through relative words so one endpoint stays at solver scale.
std::vector<std::vector<double>> pullback_metric(const TwistedGraph& g, const Representation& rep,
                                                 const EquivariantMap& u, const std::vector<Word>& words);

// Memoized holonomy transports keyed by the reduced word.
class RelativeWordCache {
  public:
    explicit RelativeWordCache(const Representation& rep);
    const Lorentz& transport(const Word& w);

  private:
    const Representation* rep_;
    std::map<std::vector<Letter>, Lorentz> cache_;
};

// Sum over loop edges of w_e * translation_length(rho(h_e))^2; a lower bound
// for the energy of every equivariant map.
double displacement_lower_bound(const TwistedGraph& g, const Representation& rep);

}  // namespace treelimit
