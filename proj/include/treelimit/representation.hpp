#pragma once

#include <cstdint>
#include <vector>

#include "treelimit/sl2c.hpp"
#include "treelimit/words.hpp"

namespace treelimit {

// Assignment of one unit-determinant matrix per generator; every relator
// must evaluate to +-I within 1e-8 (PSL(2,C) sign ambiguity accepted).
struct Representation {
    Presentation presentation;
    std::vector<Sl2c> images;
};

void validate_representation(const Representation& rep, double relator_tol = 1e-8);

// Ordered product of generator images and inverses along the word.
Sl2c evaluate(const Representation& rep, const Word& w);

// True iff the generator images share no common eigenvector, probed over the
// generators plus one random pair of words.
bool is_irreducible(const Representation& rep, std::uint64_t seed = 77);

// Entry i = translation_length(evaluate(rep, words[i])).
std::vector<double> length_function(const Representation& rep, const std::vector<Word>& words);

enum class FamilyKind { DiagStretch, FuchsianOctagon, Custom };

// One-parameter family t -> Representation; the built-in families have some
// generator-word trace unbounded as t grows.
struct RepresentationFamily {
    FamilyKind kind = FamilyKind::Custom;
    Presentation presentation;
    double t_min = 0.0;
    double t_max = 0.0;
    std::vector<Sl2c> custom_images;  // Custom: constant in t
};

// F_2 family a -> diag(e^t, e^-t), b the same stretch conjugated by the
// rotation acting on H^3 by angle pi/2 (matrix rotation by pi/4). Valid for
// all t > 0; tr rho_t(a) = 2 cosh t.
RepresentationFamily diag_stretch_family();

// Genus-2 surface group from side pairings of a hyperbolic octagon with
// angle sum 2*pi; the stretch parameter scales the octagon (hence the
// side-pairing translation lengths) while the relator stays exact within
// double precision; t in [1, 3.5], generator traces growing from ~5 to ~51.
RepresentationFamily fuchsian_octagon_family();

RepresentationFamily custom_family(Presentation pres, std::vector<Sl2c> images);

Representation family_at(const RepresentationFamily& fam, double t);

}  // namespace treelimit
