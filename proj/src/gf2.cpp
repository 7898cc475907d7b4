#include "mtdup/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

namespace mtdup::gf2 {

namespace {

constexpr std::size_t blocks_for(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace

// ---------------------------------------------------------------- BitVector

BitVector::BitVector(std::size_t size)
    : size_(size), blocks_(blocks_for(size), 0) {}

BitVector BitVector::from_word(std::uint64_t word, unsigned width) {
  if (width == 0 || width > 64) {
    throw std::invalid_argument("BitVector::from_word: width must be 1..64");
  }
  BitVector v(width);
  for (unsigned j = 0; j < width; ++j) {
    if ((word >> (width - 1 - j)) & 1u) v.set(j, true);
  }
  return v;
}

std::uint64_t BitVector::to_word() const {
  if (size_ > 64) {
    throw std::invalid_argument("BitVector::to_word: vector wider than 64");
  }
  std::uint64_t word = 0;
  for (std::size_t j = 0; j < size_; ++j) {
    if (get(j)) word |= std::uint64_t{1} << (size_ - 1 - j);
  }
  return word;
}

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    blocks_[i >> 6] |= mask;
  } else {
    blocks_[i >> 6] &= ~mask;
  }
}

bool BitVector::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](std::uint64_t b) { return b == 0; });
}

std::size_t BitVector::popcount() const {
  std::size_t n = 0;
  for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.size_ != size_) {
    throw std::invalid_argument("BitVector xor: size mismatch");
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] ^= other.blocks_[i];
  return *this;
}

BitVector BitVector::concat(const BitVector& tail) const {
  BitVector out(size_ + tail.size_);
  out.blocks_.assign(out.blocks_.size(), 0);
  std::copy(blocks_.begin(), blocks_.end(), out.blocks_.begin());
  for (std::size_t j = 0; j < tail.size_; ++j) {
    if (tail.get(j)) out.set(size_ + j, true);
  }
  return out;
}

BitVector BitVector::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > size_) {
    throw std::out_of_range("BitVector::slice: range exceeds vector");
  }
  BitVector out(length);
  for (std::size_t j = 0; j < length; ++j) {
    if (get(offset + j)) out.set(j, true);
  }
  return out;
}

std::string BitVector::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t j = 0; j < size_; ++j) s.push_back(get(j) ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(blocks_for(cols)),
      data_(rows * blocks_for(cols), 0) {}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_row_words(unsigned width,
                                    const std::vector<std::uint64_t>& rows) {
  BitMatrix m(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.set_row(r, BitVector::from_word(rows[r], width));
  }
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows) {
  if (rows.empty()) return {};
  BitMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
  return m;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool value) {
  std::uint64_t& blk = data_[r * stride_ + (c >> 6)];
  const std::uint64_t mask = std::uint64_t{1} << (c & 63);
  blk = value ? (blk | mask) : (blk & ~mask);
}

BitVector BitMatrix::row(std::size_t r) const {
  BitVector v(cols_);
  std::copy(row_ptr(r), row_ptr(r) + stride_, v.blocks_.begin());
  return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector& v) {
  if (v.size() != cols_) {
    throw std::invalid_argument("BitMatrix::set_row: length mismatch");
  }
  std::copy(v.blocks_.begin(), v.blocks_.end(), row_ptr(r));
}

std::uint64_t BitMatrix::row_word(std::size_t r) const {
  return row(r).to_word();
}

BitVector BitMatrix::column(std::size_t c) const {
  BitVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (get(r, c)) v.set(r, true);
  }
  return v;
}

bool BitMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](std::uint64_t b) { return b == 0; });
}

std::size_t BitMatrix::popcount() const {
  std::size_t n = 0;
  for (auto b : data_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (get(r, c)) t.set(c, r, true);
    }
  }
  return t;
}

BitMatrix BitMatrix::vstack(const BitMatrix& below) const {
  if (rows_ == 0 && cols_ == 0) return below;
  if (below.cols_ != cols_) {
    throw std::invalid_argument("BitMatrix::vstack: column count mismatch");
  }
  BitMatrix out(rows_ + below.rows_, cols_);
  std::copy(data_.begin(), data_.end(), out.data_.begin());
  std::copy(below.data_.begin(), below.data_.end(),
            out.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
  return out;
}

BitMatrix BitMatrix::hstack(const BitMatrix& right) const {
  if (rows_ == 0 && cols_ == 0) return right;
  if (right.rows_ != rows_) {
    throw std::invalid_argument("BitMatrix::hstack: row count mismatch");
  }
  BitMatrix out(rows_, cols_ + right.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy(row_ptr(r), row_ptr(r) + stride_, out.row_ptr(r));
    for (std::size_t c = 0; c < right.cols_; ++c) {
      if (right.get(r, c)) out.set(r, cols_ + c, true);
    }
  }
  return out;
}

BitMatrix BitMatrix::block(std::size_t row0, std::size_t col0,
                           std::size_t nrows, std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) {
    throw std::out_of_range("BitMatrix::block: range exceeds matrix");
  }
  BitMatrix out(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      if (get(row0 + r, col0 + c)) out.set(r, c, true);
    }
  }
  return out;
}

BitMatrix& BitMatrix::operator+=(const BitMatrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("BitMatrix addition: dimension mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] ^= other.data_[i];
  return *this;
}

std::string BitMatrix::to_string() const {
  std::string s;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) s.push_back(get(r, c) ? '1' : '.');
    s.push_back('\n');
  }
  return s;
}

// --------------------------------------------------------------- operations

BitMatrix mat_mul(const BitMatrix& lhs, const BitMatrix& rhs) {
  if (lhs.cols_ != rhs.rows_) {
    throw std::invalid_argument("mat_mul: lhs.cols != rhs.rows");
  }
  BitMatrix out(lhs.rows_, rhs.cols_);
  for (std::size_t i = 0; i < lhs.rows_; ++i) {
    std::uint64_t* dst = out.row_ptr(i);
    const std::uint64_t* a = lhs.row_ptr(i);
    for (std::size_t blk = 0; blk < lhs.stride_; ++blk) {
      std::uint64_t bits = a[blk];
      while (bits != 0) {
        const auto k = blk * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        const std::uint64_t* src = rhs.row_ptr(k);
        for (std::size_t j = 0; j < out.stride_; ++j) dst[j] ^= src[j];
      }
    }
  }
  return out;
}

BitVector operator*(const BitVector& v, const BitMatrix& m) {
  if (v.size() != m.rows_) {
    throw std::invalid_argument("vector * matrix: length mismatch");
  }
  BitVector out(m.cols_);
  for (std::size_t blk = 0; blk < v.blocks_.size(); ++blk) {
    std::uint64_t bits = v.blocks_[blk];
    while (bits != 0) {
      const auto k = blk * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      bits &= bits - 1;
      const std::uint64_t* src = m.row_ptr(k);
      for (std::size_t j = 0; j < m.stride_; ++j) out.blocks_[j] ^= src[j];
    }
  }
  return out;
}

BitMatrix mat_pow(const BitMatrix& m, std::uint64_t e) {
  if (!m.square()) throw std::invalid_argument("mat_pow: matrix not square");
  BitMatrix result = BitMatrix::identity(m.rows());
  BitMatrix base = m;
  while (e != 0) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e != 0) base = base * base;
  }
  return result;
}

std::size_t mat_rank(const BitMatrix& m) {
  BitMatrix work = m;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < work.cols_ && rank < work.rows_; ++c) {
    const std::size_t blk = c >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (c & 63);
    std::size_t pivot = rank;
    while (pivot < work.rows_ && !(work.row_ptr(pivot)[blk] & mask)) ++pivot;
    if (pivot == work.rows_) continue;
    if (pivot != rank) {
      std::swap_ranges(work.row_ptr(pivot), work.row_ptr(pivot) + work.stride_,
                       work.row_ptr(rank));
    }
    const std::uint64_t* p = work.row_ptr(rank);
    for (std::size_t r = rank + 1; r < work.rows_; ++r) {
      std::uint64_t* row = work.row_ptr(r);
      if (row[blk] & mask) {
        for (std::size_t j = blk; j < work.stride_; ++j) row[j] ^= p[j];
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<BitVector> left_kernel_basis(const BitMatrix& m) {
  // Row-reduce [M | I]; rows whose M part vanishes carry kernel vectors in
  // their identity part.
  BitMatrix work = m;
  std::vector<BitVector> combo;
  combo.reserve(m.rows_);
  for (std::size_t r = 0; r < m.rows_; ++r) {
    BitVector e(m.rows_);
    e.set(r, true);
    combo.push_back(std::move(e));
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < work.cols_ && rank < work.rows_; ++c) {
    const std::size_t blk = c >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (c & 63);
    std::size_t pivot = rank;
    while (pivot < work.rows_ && !(work.row_ptr(pivot)[blk] & mask)) ++pivot;
    if (pivot == work.rows_) continue;
    if (pivot != rank) {
      std::swap_ranges(work.row_ptr(pivot), work.row_ptr(pivot) + work.stride_,
                       work.row_ptr(rank));
      std::swap(combo[pivot], combo[rank]);
    }
    const std::uint64_t* p = work.row_ptr(rank);
    for (std::size_t r = rank + 1; r < work.rows_; ++r) {
      std::uint64_t* row = work.row_ptr(r);
      if (row[blk] & mask) {
        for (std::size_t j = blk; j < work.stride_; ++j) row[j] ^= p[j];
        combo[r] ^= combo[rank];
      }
    }
    ++rank;
  }
  return {std::make_move_iterator(combo.begin() + static_cast<std::ptrdiff_t>(rank)),
          std::make_move_iterator(combo.end())};
}

}  // namespace mtdup::gf2
