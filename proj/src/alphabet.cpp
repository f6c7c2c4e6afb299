#include "gshift/alphabet.hpp"


namespace gshift {

Alphabet::Alphabet(int size) : size_(size) {
    if (size < 2 || size > kMaxAlphabetSize)
        throw std::invalid_argument("alphabet size must be in [2, " +
                                    std::to_string(kMaxAlphabetSize) +
                                    "], got " + std::to_string(size));
}

std::uint64_t Alphabet::pow(int e) const noexcept {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(size_);
    return r;
}

std::uint64_t Alphabet::num_words(int length) const {
    if (length < 0) throw std::invalid_argument("negative word length");
    std::uint64_t r = 1;
    for (int i = 0; i < length; ++i) {
        r *= static_cast<std::uint64_t>(size_);
        if (r > kMaxTableEntries)
            throw LimitError("word table |S|^d exceeds limit: |S|=" +
                             std::to_string(size_) + ", d=" + std::to_string(length));
    }
    return r;
}

std::uint64_t Alphabet::index_of(const Word& w) const {
    std::uint64_t idx = 0;
    for (Symbol s : w) idx = idx * static_cast<std::uint64_t>(size_) + s;
    return idx;
}

Word Alphabet::word_at(std::uint64_t index, int length) const {
    Word w(static_cast<std::size_t>(length));
    for (int i = length - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] =
            static_cast<Symbol>(index % static_cast<std::uint64_t>(size_));
        index /= static_cast<std::uint64_t>(size_);
    }
    return w;
}

std::vector<Word> Alphabet::enumerate_words(int length) const {
    const std::uint64_t n = num_words(length);
    std::vector<Word> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(word_at(i, length));
    return out;
}

std::vector<Word> Alphabet::preimage_words(const Word& w) const {
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (int s = 0; s < size_; ++s) {
        Word y;
        y.reserve(w.size() + 1);
        y.push_back(static_cast<Symbol>(s));
        y.insert(y.end(), w.begin(), w.end());
        out.push_back(std::move(y));
    }
    return out;
}

namespace {
int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return 10 + (c - 'a');
    return -1;
}
} // namespace

Word parse_word(const std::string& text, const Alphabet& alphabet) {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        const int v = digit_value(c);
        if (v < 0 || v >= alphabet.size())
            throw std::invalid_argument("bad symbol '" + std::string(1, c) +
                                        "' for alphabet of size " +
                                        std::to_string(alphabet.size()));
        w.push_back(static_cast<Symbol>(v));
    }
    return w;
}

std::string format_word(const Word& w) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(w.size());
    for (Symbol x : w) s.push_back(digits[x]);
    return s;
}

} // namespace gshift
