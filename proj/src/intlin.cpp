#include "emtower/intlin.hpp"

#include "emtower/errors.hpp"
#include "emtower/fgab.hpp"

#include <fmt/format.h>

#include <cctype>
#include <optional>
#include <sstream>

namespace emtower {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols)
        throw EngineError(ErrorCode::InvalidArgument,
                          fmt::format("matrix {}x{} given {} entries", rows, cols, entries_.size()));
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<Integer>& diag) {
    IntMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

IntMatrix IntMatrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<Integer> e;
    e.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw EngineError(ErrorCode::InvalidArgument, "ragged matrix rows");
        for (long long v : row) e.emplace_back(v);
    }
    return IntMatrix(r, c, std::move(e));
}

bool IntMatrix::is_zero() const {
    for (const auto& x : entries_)
        if (x != 0) return false;
    return true;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::columns(std::size_t first, std::size_t count) const {
    IntMatrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
    return out;
}

IntMatrix IntMatrix::rows_range(std::size_t first, std::size_t count) const {
    IntMatrix out(count, cols_);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(first + i, j);
    return out;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t target, std::size_t source, const Integer& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(target, j) += k * (*this)(source, j);
}

void IntMatrix::add_col_multiple(std::size_t target, std::size_t source, const Integer& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, target) += k * (*this)(i, source);
}

void IntMatrix::negate_row(std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
}

void IntMatrix::negate_col(std::size_t j) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = -(*this)(i, j);
}

std::string IntMatrix::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) out += "; ";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) out += ' ';
            out += (*this)(i, j).str();
        }
    }
    return out;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows())
        throw EngineError(ErrorCode::InvalidArgument,
                          fmt::format("cannot multiply {}x{} by {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows())
        throw EngineError(ErrorCode::InvalidArgument, "hconcat: row counts differ");
    IntMatrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

IntMatrix parse_matrix(std::string_view text) {
    std::vector<std::vector<Integer>> rows;
    std::vector<Integer> current;
    std::size_t row_start = 0;
    std::size_t i = 0;

    auto finish_row = [&](std::size_t at) {
        if (current.empty())
            throw EngineError(ErrorCode::Parse, fmt::format("offset {}: empty row", at));
        if (!rows.empty() && rows.front().size() != current.size())
            throw EngineError(ErrorCode::Parse,
                              fmt::format("offset {}: row has {} entries, expected {}", row_start,
                                          current.size(), rows.front().size()));
        rows.push_back(std::move(current));
        current.clear();
    };

    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            finish_row(i);
            ++i;
            row_start = i;
        } else if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            if (c == '-' || c == '+') ++i;
            std::size_t digits = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == digits)
                throw EngineError(ErrorCode::Parse, fmt::format("offset {}: sign without digits", start));
            if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ';')
                throw EngineError(ErrorCode::Parse,
                                  fmt::format("offset {}: unexpected character '{}'", i, text[i]));
            // cpp_int rejects an explicit plus sign
            std::size_t from = c == '+' ? start + 1 : start;
            current.emplace_back(std::string(text.substr(from, i - from)));
        } else {
            throw EngineError(ErrorCode::Parse, fmt::format("offset {}: unexpected character '{}'", i, c));
        }
    }
    if (current.empty() && rows.empty())
        throw EngineError(ErrorCode::Parse, "offset 0: no entries");
    finish_row(text.size());

    std::size_t r = rows.size(), cols = rows.front().size();
    std::vector<Integer> e;
    e.reserve(r * cols);
    for (auto& row : rows)
        for (auto& x : row) e.push_back(std::move(x));
    return IntMatrix(r, cols, std::move(e));
}

std::vector<Integer> SnfResult::diagonal() const {
    std::vector<Integer> out;
    std::size_t k = std::min(d.rows(), d.cols());
    for (std::size_t i = 0; i < k; ++i) out.push_back(d(i, i));
    return out;
}

std::size_t SnfResult::rank() const {
    std::size_t r = 0;
    for (const auto& x : diagonal())
        if (x != 0) ++r;
    return r;
}

namespace {

// Tracks D = U M V together with U^-1 and V^-1 under elementary operations.
struct Reducer {
    SnfResult s;

    void row_add(std::size_t i, std::size_t j, const Integer& k) {
        s.d.add_row_multiple(i, j, k);
        s.u.add_row_multiple(i, j, k);
        s.u_inv.add_col_multiple(j, i, -k);
    }
    void col_add(std::size_t i, std::size_t j, const Integer& k) {
        s.d.add_col_multiple(i, j, k);
        s.v.add_col_multiple(i, j, k);
        s.v_inv.add_row_multiple(j, i, -k);
    }
    void row_swap(std::size_t a, std::size_t b) {
        s.d.swap_rows(a, b);
        s.u.swap_rows(a, b);
        s.u_inv.swap_cols(a, b);
    }
    void col_swap(std::size_t a, std::size_t b) {
        s.d.swap_cols(a, b);
        s.v.swap_cols(a, b);
        s.v_inv.swap_rows(a, b);
    }
    void row_neg(std::size_t i) {
        s.d.negate_row(i);
        s.u.negate_row(i);
        s.u_inv.negate_col(i);
    }

    // Smallest nonzero magnitude in the trailing block starting at t.
    std::optional<std::pair<std::size_t, std::size_t>> min_entry(std::size_t t) const {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        Integer best_abs;
        for (std::size_t i = t; i < s.d.rows(); ++i)
            for (std::size_t j = t; j < s.d.cols(); ++j) {
                const Integer& x = s.d(i, j);
                if (x == 0) continue;
                Integer a = abs(x);
                if (!best || a < best_abs) {
                    best = {i, j};
                    best_abs = a;
                    if (a == 1) return best;
                }
            }
        return best;
    }
};

} // namespace

SnfResult smith_normal_form(const IntMatrix& m) {
    Reducer red;
    red.s.d = m;
    red.s.u = IntMatrix::identity(m.rows());
    red.s.u_inv = IntMatrix::identity(m.rows());
    red.s.v = IntMatrix::identity(m.cols());
    red.s.v_inv = IntMatrix::identity(m.cols());
    IntMatrix& d = red.s.d;

    std::size_t steps = std::min(m.rows(), m.cols());
    for (std::size_t t = 0; t < steps; ++t) {
        auto pos = red.min_entry(t);
        if (!pos) break;
        for (;;) {
            red.row_swap(t, pos->first);
            red.col_swap(t, pos->second);
            const Integer pivot = d(t, t);
            bool remainder = false;
            for (std::size_t i = t + 1; i < d.rows(); ++i) {
                if (d(i, t) == 0) continue;
                Integer q = d(i, t) / pivot;
                red.row_add(i, t, -q);
                if (d(i, t) != 0) remainder = true;
            }
            for (std::size_t j = t + 1; j < d.cols(); ++j) {
                if (d(t, j) == 0) continue;
                Integer q = d(t, j) / pivot;
                red.col_add(j, t, -q);
                if (d(t, j) != 0) remainder = true;
            }
            if (!remainder) {
                // Row and column cleared; enforce divisibility of the block.
                std::optional<std::size_t> bad_row;
                for (std::size_t i = t + 1; i < d.rows() && !bad_row; ++i)
                    for (std::size_t j = t + 1; j < d.cols(); ++j)
                        if (d(i, j) % pivot != 0) {
                            bad_row = i;
                            break;
                        }
                if (!bad_row) break;
                red.row_add(t, *bad_row, Integer(1));
            }
            pos = red.min_entry(t);
        }
        if (d(t, t) < 0) red.row_neg(t);
    }
    return red.s;
}

FgAbGroup cokernel(const IntMatrix& m) {
    SnfResult s = smith_normal_form(m);
    std::size_t rank = s.rank();
    std::vector<Integer> torsion;
    for (const auto& x : s.diagonal())
        if (x > 1) torsion.push_back(x);
    return FgAbGroup::from_chain(m.rows() - rank, std::move(torsion));
}

std::pair<FgAbGroup, IntMatrix> kernel(const IntMatrix& m) {
    SnfResult s = smith_normal_form(m);
    std::size_t rank = s.rank();
    std::size_t k = m.cols() - rank;
    return {FgAbGroup::free(k), s.v.columns(rank, k)};
}

std::size_t image_rank(const IntMatrix& m) { return smith_normal_form(m).rank(); }

FgAbGroup lattice_quotient(const IntMatrix& sup, const IntMatrix& sub) {
    if (sup.rows() != sub.rows())
        throw EngineError(ErrorCode::InvalidArgument, "lattice_quotient: ambient dimensions differ");
    SnfResult s = smith_normal_form(sup);
    std::size_t rank = s.rank();
    std::vector<Integer> diag = s.diagonal();
    // Coordinates of sub in the basis U^-1 diag(d) of span(sup).
    IntMatrix y = s.u * sub;
    IntMatrix coords(rank, sub.cols());
    for (std::size_t j = 0; j < sub.cols(); ++j) {
        for (std::size_t i = rank; i < y.rows(); ++i)
            if (y(i, j) != 0)
                throw EngineError(ErrorCode::InvalidArgument, "lattice_quotient: sublattice not contained");
        for (std::size_t i = 0; i < rank; ++i) {
            if (y(i, j) % diag[i] != 0)
                throw EngineError(ErrorCode::InvalidArgument, "lattice_quotient: sublattice not contained");
            coords(i, j) = y(i, j) / diag[i];
        }
    }
    return cokernel(coords);
}

Integer determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw EngineError(ErrorCode::InvalidArgument, "determinant of non-square matrix");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            a.swap_rows(k, swap);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

} // namespace emtower
