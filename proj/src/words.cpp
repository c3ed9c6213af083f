#include "treelimit/words.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "treelimit/errors.hpp"

namespace treelimit {

bool Word::operator<(const Word& o) const {
    if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
    return std::lexicographical_compare(letters.begin(), letters.end(), o.letters.begin(), o.letters.end());
}

Word reduce(std::vector<Letter> letters) {
    std::vector<Letter> out;
    for (const Letter& l : letters) {
        if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp)
            out.pop_back();
        else
            out.push_back(l);
    }
    return Word{std::move(out)};
}

Word concat(const Word& x, const Word& y) {
    std::vector<Letter> all = x.letters;
    all.insert(all.end(), y.letters.begin(), y.letters.end());
    return reduce(std::move(all));
}

Word inverse(const Word& w) {
    std::vector<Letter> out;
    out.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        out.push_back({it->gen, -it->exp});
    return Word{std::move(out)};
}

bool is_reduced(const Word& w) {
    for (size_t i = 1; i < w.letters.size(); ++i)
        if (w.letters[i].gen == w.letters[i - 1].gen && w.letters[i].exp == -w.letters[i - 1].exp)
            return false;
    return true;
}

bool is_cyclically_reduced(const Word& w) {
    if (!is_reduced(w)) return false;
    if (w.letters.size() < 2) return true;
    const Letter& first = w.letters.front();
    const Letter& last = w.letters.back();
    return !(first.gen == last.gen && first.exp == -last.exp);
}

Word cyclic_reduce(const Word& w) {
    Word r = reduce(w.letters);
    while (r.letters.size() >= 2) {
        const Letter& first = r.letters.front();
        const Letter& last = r.letters.back();
        if (first.gen == last.gen && first.exp == -last.exp) {
            r.letters.erase(r.letters.begin());
            r.letters.pop_back();
        } else {
            break;
        }
    }
    return r;
}

Word canonical_class_representative(const Word& w) {
    if (w.empty()) return w;
    Word best = w;
    auto consider_rotations = [&best](const Word& u) {
        const size_t n = u.letters.size();
        for (size_t shift = 0; shift < n; ++shift) {
            Word rot;
            rot.letters.reserve(n);
            for (size_t i = 0; i < n; ++i) rot.letters.push_back(u.letters[(i + shift) % n]);
            if (rot < best) best = rot;
        }
    };
    consider_rotations(w);
    consider_rotations(inverse(w));
    return best;
}

void validate_presentation(const Presentation& p) {
    if (p.generators.empty()) throw ConfigError("presentation needs at least one generator", "presentation.generators");
    std::set<std::string> names(p.generators.begin(), p.generators.end());
    if (names.size() != p.generators.size())
        throw ConfigError("generator names must be distinct", "presentation.generators");
    for (const Word& r : p.relators) {
        if (r.empty()) throw ConfigError("relators must be nonempty", "presentation.relators");
        if (!is_reduced(r)) throw ConfigError("relators must be freely reduced", "presentation.relators");
        for (const Letter& l : r.letters)
            if (l.gen < 0 || l.gen >= p.rank())
                throw ConfigError("relator letter out of range", "presentation.relators");
    }
}

namespace {

void enumerate_reduced(int rank, int max_len, std::vector<Letter>& stack,
                       const std::function<void(const std::vector<Letter>&)>& visit) {
    if (static_cast<int>(stack.size()) == max_len) return;
    for (int g = 0; g < rank; ++g) {
        for (int e : {1, -1}) {
            if (!stack.empty() && stack.back().gen == g && stack.back().exp == -e) continue;
            stack.push_back({g, e});
            visit(stack);
            enumerate_reduced(rank, max_len, stack, visit);
            stack.pop_back();
        }
    }
}

}  // namespace

std::vector<Word> word_list(const Presentation& p, int max_len) {
    if (max_len < 1) throw RangeError("word_list needs max_len >= 1");
    std::vector<Word> out;
    std::vector<Letter> stack;
    enumerate_reduced(p.rank(), max_len, stack, [&out](const std::vector<Letter>& w) {
        Word word{w};
        if (!is_cyclically_reduced(word)) return;
        if (canonical_class_representative(word) == word) out.push_back(word);
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Word> all_reduced_words(const Presentation& p, int max_len) {
    std::vector<Word> out;
    out.push_back(Word{});
    std::vector<Letter> stack;
    enumerate_reduced(p.rank(), max_len, stack, [&out](const std::vector<Letter>& w) {
        out.push_back(Word{w});
    });
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

bool single_lowercase_names(const Presentation& p) {
    for (const std::string& n : p.generators)
        if (n.size() != 1 || !std::islower(static_cast<unsigned char>(n[0]))) return false;
    return true;
}

}  // namespace

std::string word_to_string(const Presentation& p, const Word& w) {
    if (w.empty()) return "1";
    if (single_lowercase_names(p)) {
        std::string s;
        for (const Letter& l : w.letters) {
            char c = p.generators[static_cast<size_t>(l.gen)][0];
            s.push_back(l.exp > 0 ? c : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        return s;
    }
    std::string s;
    for (size_t i = 0; i < w.letters.size(); ++i) {
        if (i) s.push_back('.');
        s += p.generators[static_cast<size_t>(w.letters[i].gen)];
        if (w.letters[i].exp < 0) s += "^-1";
    }
    return s;
}

Word parse_word(const Presentation& p, const std::string& text) {
    if (text.empty() || text == "1") return Word{};
    std::vector<Letter> letters;
    if (text.find('.') == std::string::npos && single_lowercase_names(p)) {
        for (char c : text) {
            char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            int gen = -1;
            for (int g = 0; g < p.rank(); ++g)
                if (p.generators[static_cast<size_t>(g)][0] == lower) gen = g;
            if (gen < 0) throw MalformedWordError("unknown generator letter: " + std::string(1, c));
            letters.push_back({gen, std::islower(static_cast<unsigned char>(c)) ? 1 : -1});
        }
    } else {
        size_t pos = 0;
        while (pos < text.size()) {
            size_t dot = text.find('.', pos);
            std::string token = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
            pos = dot == std::string::npos ? text.size() : dot + 1;
            int exp = 1;
            if (token.size() > 3 && token.substr(token.size() - 3) == "^-1") {
                exp = -1;
                token = token.substr(0, token.size() - 3);
            }
            int gen = -1;
            for (int g = 0; g < p.rank(); ++g)
                if (p.generators[static_cast<size_t>(g)] == token) gen = g;
            if (gen < 0) throw MalformedWordError("unknown generator: " + token);
            letters.push_back({gen, exp});
        }
    }
    Word w = reduce(std::move(letters));
    return w;
}

}  // namespace treelimit
