#pragma once

#include <cstddef>
#include <vector>

namespace qmicro {

/// Which one-sided limit to take when a query lands exactly on a knot.
enum class Side { left, right };

/// Piecewise polynomial supported on [knots.front(), knots.back()].
///
/// Piece i lives on the left-open, right-closed interval (knots[i], knots[i+1]]
/// and is stored as monomial coefficients c_0..c_d in the local coordinate
/// u = (E - knots[i]) / (knots[i+1] - knots[i]) in [0, 1]. Outside the support
/// the value is 0. At E == knots.front() the first piece is evaluated at u = 0
/// so a density that is flat up to the boundary keeps its closed-interval value.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> knots, std::vector<std::vector<double>> pieces);

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<std::vector<double>>& pieces() const noexcept { return pieces_; }
    std::size_t num_pieces() const noexcept { return pieces_.size(); }
    double lower() const noexcept { return knots_.front(); }
    double upper() const noexcept { return knots_.back(); }
    double width(std::size_t piece) const { return knots_[piece + 1] - knots_[piece]; }

    /// Index of the piece owning E under the (left-open, right-closed] rule,
    /// or -1 outside the support.
    long locate(double E) const;
    bool is_knot(double E) const;

    double operator()(double E) const;
    /// d/dE of the active piece; at an interior knot `side` picks the piece.
    double derivative(double E, Side side = Side::left) const;
    /// Integral from lower() to E using exact antiderivatives of the pieces.
    double integral_to(double E) const;
    double total_integral() const;

    /// Value of piece i at local coordinate u (no support check).
    double eval_local(std::size_t piece, double u) const;
    /// d/du of piece i at local coordinate u.
    double derivative_local(std::size_t piece, double u) const;

    PiecewisePoly scaled(double factor) const;

private:
    double piece_integral(std::size_t piece, double u) const;

    std::vector<double> knots_;
    std::vector<std::vector<double>> pieces_;
    std::vector<double> cumulative_;  // integral up to knots_[i]
};

}  // namespace qmicro
