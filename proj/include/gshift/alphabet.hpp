#ifndef GSHIFT_ALPHABET_HPP
#define GSHIFT_ALPHABET_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gshift {

/// Symbol index into a finite alphabet {0, ..., size-1}.
using Symbol = std::uint8_t;

/// Finite symbol string. Index 0 is the coordinate x0 of a one-sided point,
/// i.e. the most recently prepended symbol. Length 0 denotes the whole space.
using Word = std::vector<Symbol>;

/// Thrown when a dense word table would exceed the configured entry limit.
struct LimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxAlphabetSize = 16;
inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

/// The finite alphabet S. Words of length d are ranked lexicographically:
/// index(w) = sum_i w[i] * |S|^(d-1-i), a bijection with [0, |S|^d).
class Alphabet {
  public:
    explicit Alphabet(int size);

    int size() const noexcept { return size_; }

    /// |S|^e without any limit check; e must be small enough not to overflow.
    std::uint64_t pow(int e) const noexcept;

    /// |S|^length, throwing LimitError beyond kMaxTableEntries.
    std::uint64_t num_words(int length) const;

    std::uint64_t index_of(const Word& w) const;
    Word word_at(std::uint64_t index, int length) const;

    /// All words of a given length in index (lexicographic) order.
    std::vector<Word> enumerate_words(int length) const;

    /// {s.w : s in S}, in symbol order; each one symbol longer than w.
    std::vector<Word> preimage_words(const Word& w) const;

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.size_ == b.size_;
    }

  private:
    int size_;
};

/// Parse a word from a digit string, e.g. "010" over a binary alphabet.
/// Symbols 10..15 are written a..f. Empty string is the empty word.
Word parse_word(const std::string& text, const Alphabet& alphabet);

std::string format_word(const Word& w);

} // namespace gshift

#endif
