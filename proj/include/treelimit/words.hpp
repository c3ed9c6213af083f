#pragma once

#include <string>
#include <vector>

namespace treelimit {

// One letter of a group word: generator index with exponent +1 or -1.
struct Letter {
    int gen = 0;
    int exp = 1;

    bool operator==(const Letter& o) const { return gen == o.gen && exp == o.exp; }
    // Generator order first, positive exponent before negative.
    bool operator<(const Letter& o) const {
        if (gen != o.gen) return gen < o.gen;
        return exp > o.exp;
    }
};

// A freely reduced word over the generators.
struct Word {
    std::vector<Letter> letters;

    bool empty() const { return letters.empty(); }
    int length() const { return static_cast<int>(letters.size()); }
    bool operator==(const Word& o) const { return letters == o.letters; }
    bool operator<(const Word& o) const;
};

Word reduce(std::vector<Letter> letters);
Word concat(const Word& x, const Word& y);  // reduced product
Word inverse(const Word& w);
Word cyclic_reduce(const Word& w);
bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);

// Lexicographically least among the cyclic rotations of w and of w^{-1}
// (w must be cyclically reduced).
Word canonical_class_representative(const Word& w);

struct Presentation {
    std::vector<std::string> generators;
    std::vector<Word> relators;

    int rank() const { return static_cast<int>(generators.size()); }
};

void validate_presentation(const Presentation& p);

// All freely and cyclically reduced words of length <= max_len, one
// representative per cyclic-rotation-and-inversion class, in deterministic
// (length-major, lexicographic) order.
std::vector<Word> word_list(const Presentation& p, int max_len);

// All freely reduced words of length <= max_len including the empty word;
// closed under left multiplication by generators up to the truncation length.
std::vector<Word> all_reduced_words(const Presentation& p, int max_len);

// Compact form when every generator name is one lowercase letter ("abA",
// uppercase = inverse); dotted form otherwise ("a1.b1^-1").
std::string word_to_string(const Presentation& p, const Word& w);
Word parse_word(const Presentation& p, const std::string& text);

}  // namespace treelimit
