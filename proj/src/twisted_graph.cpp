#include "treelimit/twisted_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "treelimit/errors.hpp"

namespace treelimit {

void validate_graph(const TwistedGraph& g) {
    if (g.vertex_count < 1) throw ConfigError("graph needs at least one vertex", "graph.vertices");
    std::vector<int> parent(static_cast<size_t>(g.vertex_count));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); };
    for (const TwistedEdge& e : g.edges) {
        if (e.tail < 0 || e.tail >= g.vertex_count || e.head < 0 || e.head >= g.vertex_count)
            throw ConfigError("edge endpoint out of range", "graph.edges");
        if (!(e.weight > 0.0)) throw ConfigError("edge weights must be positive", "graph.edges");
        parent[static_cast<size_t>(find(e.tail))] = find(e.head);
    }
    for (int v = 0; v < g.vertex_count; ++v)
        if (find(v) != find(0)) throw ConfigError("graph must be connected", "graph.edges");
}

EquivariantMap default_initial_map(const TwistedGraph& g) {
    EquivariantMap u;
    u.positions.assign(static_cast<size_t>(g.vertex_count), origin_point());
    return u;
}

namespace {

// Per-edge Lorentz transports, fixed for the duration of a solve.
struct EdgeTransports {
    std::vector<Lorentz> fwd;  // rho(h_e)
    std::vector<Lorentz> bwd;  // rho(h_e)^-1
};

EdgeTransports transports(const TwistedGraph& g, const Representation& rep) {
    EdgeTransports t;
    t.fwd.reserve(g.edges.size());
    t.bwd.reserve(g.edges.size());
    for (const TwistedEdge& e : g.edges) {
        Sl2c m = evaluate(rep, e.holonomy);
        t.fwd.push_back(to_lorentz(m));
        t.bwd.push_back(to_lorentz(m.inverse()));
    }
    return t;
}

double energy_with(const TwistedGraph& g, const EdgeTransports& t, const std::vector<Vec4>& pos) {
    double total = 0.0;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const TwistedEdge& e = g.edges[i];
        double d = hyperbolic_distance(pos[static_cast<size_t>(e.tail)],
                                       t.fwd[i].apply(pos[static_cast<size_t>(e.head)]));
        total += e.weight * d * d;
    }
    return total;
}

std::vector<Vec4> gradient_with(const TwistedGraph& g, const EdgeTransports& t, const std::vector<Vec4>& pos) {
    std::vector<Vec4> grad(pos.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const TwistedEdge& e = g.edges[i];
        const Vec4& pt = pos[static_cast<size_t>(e.tail)];
        const Vec4& ph = pos[static_cast<size_t>(e.head)];
        Vec4 tail_term = log_map(pt, t.fwd[i].apply(ph)) * (-2.0 * e.weight);
        Vec4 head_term = log_map(ph, t.bwd[i].apply(pt)) * (-2.0 * e.weight);
        grad[static_cast<size_t>(e.tail)] = grad[static_cast<size_t>(e.tail)] + tail_term;
        grad[static_cast<size_t>(e.head)] = grad[static_cast<size_t>(e.head)] + head_term;
    }
    return grad;
}

double gradient_norm(const std::vector<Vec4>& grad) {
    double s = 0.0;
    for (const Vec4& v : grad) s += minkowski(v, v);
    return std::sqrt(std::max(s, 0.0));
}

std::vector<Vec4> step_along(const std::vector<Vec4>& pos, const std::vector<Vec4>& grad, double eta) {
    std::vector<Vec4> out(pos.size());
    for (size_t v = 0; v < pos.size(); ++v) out[v] = exp_map(pos[v], grad[v] * (-eta));
    return out;
}

// One Jacobi sweep toward the weighted Karcher mean of the holonomy
// transported neighbors, 20 inner gradient steps per vertex. Other vertices
// are read from the previous iterate; a slot whose opposite endpoint is the
// vertex itself (a loop) transports the moving inner point.
std::vector<Vec4> karcher_sweep(const TwistedGraph& g, const EdgeTransports& t, const std::vector<Vec4>& pos) {
    struct Slot {
        double weight;
        const Lorentz* transport;
        int source;  // opposite endpoint
    };
    std::vector<Vec4> out = pos;
    for (int v = 0; v < g.vertex_count; ++v) {
        std::vector<Slot> slots;
        for (size_t i = 0; i < g.edges.size(); ++i) {
            const TwistedEdge& e = g.edges[i];
            if (e.tail == v) slots.push_back({e.weight, &t.fwd[i], e.head});
            if (e.head == v) slots.push_back({e.weight, &t.bwd[i], e.tail});
        }
        if (slots.empty()) continue;
        double wsum = 0.0;
        for (const Slot& s : slots) wsum += s.weight;
        Vec4 p = pos[static_cast<size_t>(v)];
        for (int it = 0; it < 20; ++it) {
            Vec4 move{};
            for (const Slot& s : slots) {
                const Vec4& base = s.source == v ? p : pos[static_cast<size_t>(s.source)];
                move = move + log_map(p, s.transport->apply(base)) * (s.weight / wsum);
            }
            p = exp_map(p, move);
        }
        out[static_cast<size_t>(v)] = p;
    }
    return out;
}

double map_diameter(const std::vector<Vec4>& pos) {
    double d = 0.0;
    for (size_t i = 0; i < pos.size(); ++i)
        for (size_t j = i + 1; j < pos.size(); ++j) d = std::max(d, hyperbolic_distance(pos[i], pos[j]));
    return d;
}

}  // namespace

double energy(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u) {
    return energy_with(g, transports(g, rep), u.positions);
}

std::vector<Vec4> energy_gradient(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u) {
    return gradient_with(g, transports(g, rep), u.positions);
}

namespace {

// SL2(C) element carrying the origin to the point of the positive Hermitian
// matrix X (det 1): the Hermitian square root (X + I)/sqrt(tr X + 2).
Sl2c transvection_to(const Vec4& x) {
    double tr = 2.0 * x[0];
    double s = 1.0 / std::sqrt(tr + 2.0);
    Complex h01(x[1], x[2]);
    return {Complex((x[0] + x[3] + 1.0) * s, 0.0), h01 * s, std::conj(h01) * s,
            Complex((x[0] - x[3] + 1.0) * s, 0.0)};
}

}  // namespace

std::pair<EquivariantMap, SolveReport> minimize(const TwistedGraph& g, const Representation& rep,
                                                const EquivariantMap& init, double tol, int max_iter) {
    if (!(tol > 0.0)) throw RangeError("solver tolerance must be positive");
    validate_graph(g);

    // Solver state lives in a moving gauge: positions stay near the origin
    // and the edge matrices are conjugated along, so precision does not decay
    // when the whole configuration drifts (the escaped regime).
    std::vector<Sl2c> matrices;
    matrices.reserve(g.edges.size());
    for (const TwistedEdge& e : g.edges) matrices.push_back(evaluate(rep, e.holonomy));
    auto transports_of = [&]() {
        EdgeTransports t;
        for (const Sl2c& m : matrices) {
            t.fwd.push_back(to_lorentz(m));
            t.bwd.push_back(to_lorentz(m.inverse()));
        }
        return t;
    };

    std::vector<Vec4> pos = init.positions;
    for (Vec4& p : pos) p = normalize_point(p);
    std::vector<Vec4> start = pos;
    Lorentz gauge = Lorentz::identity();  // real position = gauge * local position
    EdgeTransports t = transports_of();

    double max_gen_length = 0.0;
    for (const Sl2c& m : rep.images) max_gen_length = std::max(max_gen_length, translation_length(m));
    const double escape_radius = 10.0 * (1.0 + map_diameter(start) + max_gen_length);
    const double max_move = 4.0;  // per-iteration cap on vertex displacement

    SolveReport report;
    double e = energy_with(g, t, pos);
    report.energy_trace.push_back(e);
    double eta_start = 1.0;

    auto finish = [&](SolveStatus status, double gn, int iters) {
        report.status = status;
        report.final_energy = e;
        report.gradient_norm = gn;
        report.iterations = iters;
        std::vector<Vec4> world(pos.size());
        for (size_t v = 0; v < pos.size(); ++v) world[v] = normalize_point(gauge.apply(pos[v]));
        return std::make_pair(EquivariantMap{std::move(world)}, report);
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // Recentre once the local frame grows; pure gauge motion, the
        // energy landscape is untouched.
        if (pos[0][0] > 50.0) {
            Sl2c move = transvection_to(pos[0]);
            Lorentz back = to_lorentz(move.inverse());
            for (Vec4& p : pos) p = normalize_point(back.apply(p));
            for (Sl2c& m : matrices) {
                m = move.inverse() * m * move;
                double scale = std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
                if (scale < 1e6) m = m.normalized();
            }
            t = transports_of();
            gauge = gauge * to_lorentz(move);
        }

        std::vector<Vec4> grad = gradient_with(g, t, pos);
        double gn = gradient_norm(grad);

        double drift = 0.0;
        for (size_t v = 0; v < pos.size(); ++v)
            drift = std::max(drift, hyperbolic_distance(normalize_point(gauge.apply(pos[v])), start[v]));
        if (drift > escape_radius && gn <= 10.0 * tol) return finish(SolveStatus::Escaped, gn, iter);
        if (gn <= tol) return finish(SolveStatus::Converged, gn, iter);

        double max_step_len = 0.0;
        for (const Vec4& gv : grad) max_step_len = std::max(max_step_len, std::sqrt(std::max(minkowski(gv, gv), 0.0)));
        double eta = eta_start;
        if (eta * max_step_len > max_move) eta = max_move / max_step_len;

        bool accepted = false;
        double e_before = e;
        while (eta > 1e-14) {
            std::vector<Vec4> trial = step_along(pos, grad, eta);
            double e_trial = energy_with(g, t, trial);
            if (e_trial <= e - 1e-4 * eta * gn * gn) {
                pos = std::move(trial);
                e = e_trial;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }

        // Backtracking loses its signal once energy differences sink to the
        // ulp floor; the weighted-mean sweep still contracts toward the
        // minimizer, so it finishes the descent (accepted on gradient-norm
        // decrease, where the energy cannot discriminate).
        bool stalled = !accepted || (e_before - e) <= 64.0 * 2.3e-16 * std::max(e_before, 1.0);
        if (stalled) {
            std::vector<Vec4> swept = karcher_sweep(g, t, pos);
            double e_swept = energy_with(g, t, swept);
            double gn_swept = gradient_norm(gradient_with(g, t, swept));
            if (e_swept < e || gn_swept < gn) {
                pos = std::move(swept);
                e = e_swept;
                eta_start = 1.0;
            } else if (!accepted) {
                break;  // no further progress possible at this precision
            }
        } else {
            eta_start = 2.0 * eta;
        }
        report.energy_trace.push_back(e);
    }

    double gn = gradient_norm(gradient_with(g, t, pos));
    auto result = finish(gn <= tol ? SolveStatus::Converged : SolveStatus::MaxIterations, gn, iter);
    return result;
}

double lipschitz_ratio(const TwistedGraph& g, const Representation& rep, const EquivariantMap& u) {
    EdgeTransports t = transports(g, rep);
    double total = energy_with(g, t, u.positions);
    if (total <= 0.0) return 0.0;
    double worst = 0.0;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const TwistedEdge& e = g.edges[i];
        double d = hyperbolic_distance(u.positions[static_cast<size_t>(e.tail)],
                                       t.fwd[i].apply(u.positions[static_cast<size_t>(e.head)]));
        worst = std::max(worst, d * d / e.weight);
    }
    return worst / total;
}

std::vector<SampleLabel> sample_labels(const TwistedGraph& g, const std::vector<Word>& words) {
    std::vector<SampleLabel> out;
    out.reserve(static_cast<size_t>(g.vertex_count) * words.size());
    for (int v = 0; v < g.vertex_count; ++v)
        for (const Word& w : words) out.push_back({v, w});
    return out;
}

std::vector<std::vector<double>> pullback_metric(const TwistedGraph& g, const Representation& rep,
                                                 const EquivariantMap& u, const std::vector<Word>& words) {
    // d(rho(w_i) u(v_i), rho(w_j) u(v_j)) = d(u(v_i), rho(w_i^-1 w_j) u(v_j)):
    // keeping one endpoint at solver scale is what makes deep orbit samples
    // resolvable in double precision.
    std::vector<SampleLabel> labels = sample_labels(g, words);
    RelativeWordCache cache(rep);
    size_t n = labels.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            Word rel = concat(inverse(labels[i].word), labels[j].word);
            double d;
            if (labels[i].vertex == labels[j].vertex && rel.empty()) {
                d = 0.0;
            } else {
                const Lorentz& L = cache.transport(rel);
                d = hyperbolic_distance(u.positions[static_cast<size_t>(labels[i].vertex)],
                                        L.apply(u.positions[static_cast<size_t>(labels[j].vertex)]));
            }
            m[i][j] = d;
            m[j][i] = d;
        }
    return m;
}

RelativeWordCache::RelativeWordCache(const Representation& rep) : rep_(&rep) {}

const Lorentz& RelativeWordCache::transport(const Word& w) {
    auto it = cache_.find(w.letters);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(w.letters, to_lorentz(evaluate(*rep_, w))).first->second;
}

double displacement_lower_bound(const TwistedGraph& g, const Representation& rep) {
    double bound = 0.0;
    for (const TwistedEdge& e : g.edges) {
        if (e.tail != e.head) continue;
        double l = translation_length(evaluate(rep, e.holonomy));
        bound += e.weight * l * l;
    }
    return bound;
}

}  // namespace treelimit
