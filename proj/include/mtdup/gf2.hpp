#pragma once

// Dense linear algebra over the two-element field.
//
// Conventions: vectors are horizontal and matrices act on them from the
// right (v * M).  When a vector or a matrix row is converted to or from a
// machine word of width w, component 1 is the most significant bit of the
// word and component w the least significant one.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mtdup::gf2 {

class BitMatrix;

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size);

  /// Vector of length `width` whose component j (0-based) is bit
  /// (width - 1 - j) of `word`.
  static BitVector from_word(std::uint64_t word, unsigned width);
  std::uint64_t to_word() const;

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const {
    return (blocks_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool value);
  void flip(std::size_t i) { blocks_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  bool is_zero() const;
  std::size_t popcount() const;

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector lhs, const BitVector& rhs) {
    lhs ^= rhs;
    return lhs;
  }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// Concatenation (this, tail).
  BitVector concat(const BitVector& tail) const;
  /// Components [offset, offset + length).
  BitVector slice(std::size_t offset, std::size_t length) const;

  std::string to_string() const;

  const std::vector<std::uint64_t>& blocks() const { return blocks_; }

 private:
  friend class BitMatrix;
  friend BitVector operator*(const BitVector&, const BitMatrix&);
  std::size_t size_ = 0;
  std::vector<std::uint64_t> blocks_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  static BitMatrix zero(std::size_t rows, std::size_t cols) {
    return BitMatrix(rows, cols);
  }
  static BitMatrix identity(std::size_t n);
  /// Square matrix of width w whose rows are given as MSB-first words.
  static BitMatrix from_row_words(unsigned width,
                                  const std::vector<std::uint64_t>& rows);
  static BitMatrix from_rows(const std::vector<BitVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * stride_ + (c >> 6)] >> (c & 63)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool value);

  BitVector row(std::size_t r) const;
  void set_row(std::size_t r, const BitVector& v);
  /// Row r as an MSB-first word; requires cols() <= 64.
  std::uint64_t row_word(std::size_t r) const;
  BitVector column(std::size_t c) const;

  bool is_zero() const;
  std::size_t popcount() const;

  BitMatrix transpose() const;
  /// [this over below]
  BitMatrix vstack(const BitMatrix& below) const;
  /// [this | right]
  BitMatrix hstack(const BitMatrix& right) const;
  BitMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                  std::size_t ncols) const;

  BitMatrix& operator+=(const BitMatrix& other);
  friend BitMatrix operator+(BitMatrix lhs, const BitMatrix& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

  std::string to_string() const;

 private:
  friend BitMatrix mat_mul(const BitMatrix&, const BitMatrix&);
  friend BitVector operator*(const BitVector&, const BitMatrix&);
  friend std::size_t mat_rank(const BitMatrix&);
  friend std::vector<BitVector> left_kernel_basis(const BitMatrix&);

  const std::uint64_t* row_ptr(std::size_t r) const {
    return data_.data() + r * stride_;
  }
  std::uint64_t* row_ptr(std::size_t r) { return data_.data() + r * stride_; }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Throws std::invalid_argument when lhs.cols() != rhs.rows().
BitMatrix mat_mul(const BitMatrix& lhs, const BitMatrix& rhs);
inline BitMatrix operator*(const BitMatrix& lhs, const BitMatrix& rhs) {
  return mat_mul(lhs, rhs);
}
/// Row vector times matrix.
BitVector operator*(const BitVector& v, const BitMatrix& m);

/// Square-and-multiply; M^0 is the identity.
BitMatrix mat_pow(const BitMatrix& m, std::uint64_t e);

/// Gaussian elimination with the leftmost available pivot.
std::size_t mat_rank(const BitMatrix& m);

/// Basis of { v : v * M = 0 }.  Its size is rows - rank(M).
std::vector<BitVector> left_kernel_basis(const BitMatrix& m);

template <class S>
concept EntropySource = requires(S& s) {
  { s.next64() } -> std::convertible_to<std::uint64_t>;
};

/// Uniform element of the span of `basis` (the zero vector of length
/// `size` when the basis is empty).
template <EntropySource S>
BitVector sample_span(const std::vector<BitVector>& basis, std::size_t size,
                      S& entropy) {
  BitVector v(size);
  std::uint64_t bits = 0;
  unsigned left = 0;
  for (const auto& b : basis) {
    if (left == 0) {
      bits = entropy.next64();
      left = 64;
    }
    if (bits & 1u) v ^= b;
    bits >>= 1;
    --left;
  }
  return v;
}

/// Uniform random solution of v * M = 0.
template <EntropySource S>
BitVector sample_kernel(const BitMatrix& m, S& entropy) {
  return sample_span(left_kernel_basis(m), m.rows(), entropy);
}

}  // namespace mtdup::gf2
