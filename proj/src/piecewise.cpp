#include "qmicro/piecewise.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmicro {

PiecewisePoly::PiecewisePoly(std::vector<double> knots, std::vector<std::vector<double>> pieces)
    : knots_(std::move(knots)), pieces_(std::move(pieces)) {
    if (knots_.size() < 2 || pieces_.size() + 1 != knots_.size()) {
        throw std::invalid_argument("PiecewisePoly: need one piece per knot interval");
    }
    cumulative_.assign(knots_.size(), 0.0);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        cumulative_[i + 1] = cumulative_[i] + piece_integral(i, 1.0);
    }
}

long PiecewisePoly::locate(double E) const {
    if (E < knots_.front() || E > knots_.back()) return -1;
    if (E == knots_.front()) return 0;
    // first knot >= E; E lies in (knots[i-1], knots[i]]
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), E);
    return static_cast<long>(it - knots_.begin()) - 1;
}

bool PiecewisePoly::is_knot(double E) const {
    return std::binary_search(knots_.begin(), knots_.end(), E);
}

double PiecewisePoly::eval_local(std::size_t piece, double u) const {
    const auto& c = pieces_[piece];
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

double PiecewisePoly::derivative_local(std::size_t piece, double u) const {
    const auto& c = pieces_[piece];
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) acc = acc * u + static_cast<double>(j) * c[j];
    return acc;
}

double PiecewisePoly::piece_integral(std::size_t piece, double u) const {
    const auto& c = pieces_[piece];
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * u + c[j] / static_cast<double>(j + 1);
    return acc * u * width(piece);
}

double PiecewisePoly::operator()(double E) const {
    const long i = locate(E);
    if (i < 0) return 0.0;
    const auto p = static_cast<std::size_t>(i);
    return eval_local(p, (E - knots_[p]) / width(p));
}

double PiecewisePoly::derivative(double E, Side side) const {
    long i = locate(E);
    if (i < 0) return 0.0;
    if (side == Side::right && E == knots_[static_cast<std::size_t>(i) + 1]) {
        if (static_cast<std::size_t>(i) + 1 == pieces_.size()) return 0.0;
        ++i;
    }
    if (side == Side::left && E == knots_.front()) return 0.0;
    const auto p = static_cast<std::size_t>(i);
    return derivative_local(p, (E - knots_[p]) / width(p)) / width(p);
}

double PiecewisePoly::integral_to(double E) const {
    if (E <= knots_.front()) return 0.0;
    if (E >= knots_.back()) return cumulative_.back();
    const auto p = static_cast<std::size_t>(locate(E));
    return cumulative_[p] + piece_integral(p, (E - knots_[p]) / width(p));
}

double PiecewisePoly::total_integral() const { return cumulative_.back(); }

PiecewisePoly PiecewisePoly::scaled(double factor) const {
    auto pieces = pieces_;
    for (auto& c : pieces) {
        for (auto& v : c) v *= factor;
    }
    return PiecewisePoly(knots_, std::move(pieces));
}

}  // namespace qmicro
