#pragma once

// Exact integer matrix algebra: Smith normal form with transforms, and
// kernel / image / cokernel presentations of maps Z^cols -> Z^rows.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emtower {

using Integer = boost::multiprecision::cpp_int;

class FgAbGroup;

/// Dense row-major matrix of arbitrary-precision integers. Zero-sized
/// dimensions are legal and denote maps to or from the trivial group.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries);

    static IntMatrix identity(std::size_t n);
    static IntMatrix diagonal(const std::vector<Integer>& diag);
    static IntMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    Integer& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    const std::vector<Integer>& entries() const noexcept { return entries_; }

    bool is_zero() const;
    IntMatrix transposed() const;
    IntMatrix columns(std::size_t first, std::size_t count) const;
    IntMatrix rows_range(std::size_t first, std::size_t count) const;

    // Elementary operations used by the reductions.
    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    void add_row_multiple(std::size_t target, std::size_t source, const Integer& k);
    void add_col_multiple(std::size_t target, std::size_t source, const Integer& k);
    void negate_row(std::size_t i);
    void negate_col(std::size_t j);

    /// Rows separated by "; ", entries by single spaces. A matrix with zero
    /// rows renders as the empty string.
    std::string to_string() const;

    friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> entries_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b);

/// Parses the text grammar `a b c; d e f` (rows separated by ';', entries by
/// whitespace). Throws EngineError(Parse) naming the character offset.
IntMatrix parse_matrix(std::string_view text);

/// U * M * V = D with U, V unimodular and D diagonal in Smith form. The
/// inverses of U and V are carried along for the lattice computations.
struct SnfResult {
    IntMatrix u;
    IntMatrix d;
    IntMatrix v;
    IntMatrix u_inv;
    IntMatrix v_inv;

    std::vector<Integer> diagonal() const;
    std::size_t rank() const;
};

SnfResult smith_normal_form(const IntMatrix& m);

/// Z^rows / columnspan(M).
FgAbGroup cokernel(const IntMatrix& m);

/// Kernel of Z^cols -> Z^rows: the free group Z^k and a cols x k basis.
std::pair<FgAbGroup, IntMatrix> kernel(const IntMatrix& m);

std::size_t image_rank(const IntMatrix& m);

/// span(sub) + span(sup) modulo span(sub), where span(sub) must lie inside
/// span(sup). Both generator sets are given as columns in the same ambient
/// Z^n. Throws EngineError(InvalidArgument) when sub is not contained.
FgAbGroup lattice_quotient(const IntMatrix& sup, const IntMatrix& sub);

/// Exact determinant of a square matrix (fraction-free elimination).
Integer determinant(const IntMatrix& m);

} // namespace emtower
