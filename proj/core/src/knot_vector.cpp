#include "splinemom/knot_vector.hpp"

#include <algorithm>
#include <cmath>

#include "splinemom/errors.hpp"

namespace splinemom {

namespace {
constexpr double kKnotMatchTol = 1e-13;

bool same_knot(double a, double b) { return std::abs(a - b) <= kKnotMatchTol; }
} // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0) throw DomainError("knot vector: negative degree");
    const int len = static_cast<int>(knots_.size());
    if (len < 2 * (degree_ + 1)) throw GeometryError("knot vector: too few knots");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
        throw GeometryError("knot vector: not non-decreasing");
    for (int i = 0; i <= degree_; ++i) {
        if (knots_[i] != 0.0) throw GeometryError("knot vector: not open at 0");
        if (knots_[len - 1 - i] != 1.0) throw GeometryError("knot vector: not open at 1");
    }
    const int max_mult = std::max(degree_, 1);
    int run = 1;
    for (int i = degree_ + 1; i < len - degree_ - 1; ++i) {
        if (knots_[i] <= 0.0 || knots_[i] >= 1.0)
            throw GeometryError("knot vector: interior knot outside (0,1)");
        run = (i > degree_ + 1 && same_knot(knots_[i], knots_[i - 1])) ? run + 1 : 1;
        if (run > max_mult) throw GeometryError("knot vector: interior multiplicity too high");
    }
    if (basis_count() < degree_ + 1)
        throw GeometryError("knot vector: fewer than degree+1 basis functions");
}

KnotVector KnotVector::uniform(int degree, int elements) {
    if (elements < 1) throw DomainError("knot vector: need at least one element");
    std::vector<double> breaks(elements + 1);
    for (int i = 0; i <= elements; ++i) breaks[i] = static_cast<double>(i) / elements;
    return from_breaks(degree, breaks);
}

KnotVector KnotVector::bernstein(int degree) {
    return from_breaks(degree, {0.0, 1.0});
}

KnotVector KnotVector::from_breaks(int degree, const std::vector<double>& breaks) {
    if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0)
        throw GeometryError("knot vector: break sequence must span [0,1]");
    std::vector<double> kn;
    const int reps = degree + 1;
    kn.insert(kn.end(), reps, 0.0);
    for (std::size_t i = 1; i + 1 < breaks.size(); ++i) {
        if (breaks[i] <= breaks[i - 1])
            throw GeometryError("knot vector: break sequence not increasing");
        kn.push_back(breaks[i]);
    }
    kn.insert(kn.end(), reps, 1.0);
    return KnotVector(std::move(kn), degree);
}

std::vector<double> KnotVector::unique_knots() const {
    std::vector<double> uk;
    for (double u : knots_)
        if (uk.empty() || !same_knot(uk.back(), u)) uk.push_back(u);
    return uk;
}

int KnotVector::element_count() const {
    return static_cast<int>(unique_knots().size()) - 1;
}

int KnotVector::find_span(double u) const {
    if (u < 0.0 || u > 1.0) throw DomainError("find_span: parameter outside [0,1]");
    const int n = basis_count();
    if (u >= knots_[n]) return n - 1; // closure: last non-empty span
    int lo = degree_, hi = n;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (u < knots_[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

int KnotVector::element_of(double u) const {
    const int span = find_span(u);
    int elem = 0;
    for (int k = degree_; k < span; ++k)
        if (knots_[k + 1] > knots_[k]) ++elem;
    return elem;
}

std::pair<double, double> KnotVector::element_bounds(int element) const {
    const auto uk = unique_knots();
    if (element < 0 || element + 1 >= static_cast<int>(uk.size()))
        throw DomainError("element_bounds: element index out of range");
    return {uk[element], uk[element + 1]};
}

int KnotVector::element_first_basis(int element) const {
    const auto [a, b] = element_bounds(element);
    (void)b;
    // span index of the element start, offset back by degree
    double mid = 0.5 * (a + b);
    return find_span(mid) - degree_;
}

Eigen::MatrixXd KnotVector::eval_basis_ders(double u, int order) const {
    if (u < 0.0 || u > 1.0) throw DomainError("eval_basis_ders: parameter outside [0,1]");
    if (order < 0) throw DomainError("eval_basis_ders: negative derivative order");
    const int p = degree_;
    const int span = find_span(u);
    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(order + 1, p + 1);
    if (p == 0) {
        ders(0, 0) = 1.0;
        return ders;
    }

    // Cox-de Boor with derivatives (two-term inverse-difference form).
    Eigen::MatrixXd ndu(p + 1, p + 1);
    Eigen::VectorXd left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left(j) = u - knots_[span + 1 - j];
        right(j) = knots_[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right(r + 1) + left(j - r);
            double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right(r + 1) * temp;
            saved = left(j - r) * temp;
        }
        ndu(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

    const int nders = std::min(order, p);
    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int kk = 1; kk <= nders; ++kk) {
            double d = 0.0;
            int rk = r - kk, pk = p - kk;
            if (r >= kk) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, kk) = -a(s1, kk - 1) / ndu(pk + 1, r);
                d += a(s2, kk) * ndu(r, pk);
            }
            ders(kk, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int kk = 1; kk <= nders; ++kk) {
        for (int j = 0; j <= p; ++j) ders(kk, j) *= factor;
        factor *= (p - kk);
    }
    return ders;
}

std::vector<double> KnotVector::greville() const {
    const int n = basis_count();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        if (degree_ == 0) {
            g[i] = 0.5 * (knots_[i] + knots_[i + 1]);
        } else {
            double sum = 0.0;
            for (int j = 1; j <= degree_; ++j) sum += knots_[i + j];
            g[i] = sum / degree_;
        }
    }
    return g;
}

std::pair<KnotVector, Eigen::MatrixXd> KnotVector::insert_knot(double u) const {
    if (u <= 0.0 || u >= 1.0) throw DomainError("insert_knot: knot must lie in (0,1)");
    const int p = degree_;
    int mult = 0;
    for (double kn : knots_)
        if (same_knot(kn, u)) ++mult;
    if (mult >= std::max(p, 1))
        throw RefinementError("insert_knot: multiplicity overflow");

    const int n = basis_count();
    const int k = find_span(u);
    std::vector<double> refined = knots_;
    refined.insert(refined.begin() + k + 1, u);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n + 1, n);
    for (int i = 0; i <= k - p; ++i) T(i, i) = 1.0;
    for (int i = std::max(k - p + 1, 1); i <= k; ++i) {
        double denom = knots_[i + p] - knots_[i];
        double alpha = (u - knots_[i]) / denom;
        T(i, i) = alpha;
        T(i, i - 1) = 1.0 - alpha;
    }
    for (int i = k + 1; i <= n; ++i) T(i, i - 1) = 1.0;
    return {KnotVector(std::move(refined), p), std::move(T)};
}

std::pair<KnotVector, Eigen::MatrixXd> KnotVector::refine_dyadic(int levels) const {
    KnotVector kv = *this;
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(basis_count(), basis_count());
    for (int l = 0; l < levels; ++l) {
        const auto uk = kv.unique_knots();
        for (std::size_t i = 0; i + 1 < uk.size(); ++i) {
            auto [next, Ti] = kv.insert_knot(0.5 * (uk[i] + uk[i + 1]));
            T = Ti * T;
            kv = std::move(next);
        }
    }
    return {std::move(kv), std::move(T)};
}

bool KnotVector::operator==(const KnotVector& other) const {
    if (degree_ != other.degree_ || knots_.size() != other.knots_.size()) return false;
    for (std::size_t i = 0; i < knots_.size(); ++i)
        if (!same_knot(knots_[i], other.knots_[i])) return false;
    return true;
}

} // namespace splinemom
