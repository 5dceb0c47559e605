#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splinemom/errors.hpp"
#include "splinemom/knot_vector.hpp"
#include "test_helpers.hpp"

using namespace splinemom;

namespace {

const std::vector<double> kCubicKnots = {0, 0, 0, 0, 0.25, 0.5, 0.5, 0.75, 1, 1, 1, 1};

// independent spline value from coefficients, straight Cox-de Boor
double spline_value(const KnotVector& kv, const Eigen::VectorXd& coeffs, double u) {
    const auto ders = kv.eval_basis_ders(u, 0);
    const int first = kv.element_first_basis(kv.element_of(u));
    double acc = 0.0;
    for (int i = 0; i <= kv.degree(); ++i) acc += ders(0, i) * coeffs(first + i);
    return acc;
}

} // namespace

TEST_CASE("find_span locates knot spans") {
    KnotVector kv(kCubicKnots, 3);
    const int span = kv.find_span(0.3);
    CHECK(kv.knots()[span] == doctest::Approx(0.25));
    CHECK(kv.knots()[span + 1] == doctest::Approx(0.5));

    CHECK(kv.find_span(0.0) == 3); // first non-empty span
    CHECK(kv.knots()[kv.find_span(0.0) + 1] > 0.0);

    KnotVector line({0, 0, 1, 1}, 1);
    CHECK(line.find_span(1.0) == 1); // closure: span [0,1)
    CHECK_THROWS_AS(line.find_span(1.5), DomainError);
    CHECK_THROWS_AS(line.find_span(-0.1), DomainError);
}

TEST_CASE("element bookkeeping") {
    KnotVector kv(kCubicKnots, 3);
    CHECK(kv.element_count() == 4);
    CHECK(kv.element_of(0.3) == 1);
    CHECK(kv.element_of(1.0) == 3);
    const auto [a, b] = kv.element_bounds(2);
    CHECK(a == doctest::Approx(0.5));
    CHECK(b == doctest::Approx(0.75));
}

TEST_CASE("hat function values") {
    KnotVector kv({0, 0, 1, 1}, 1);
    const auto d = kv.eval_basis_ders(0.25, 0);
    CHECK(d(0, 0) == doctest::Approx(0.75));
    CHECK(d(0, 1) == doctest::Approx(0.25));
}

TEST_CASE("bernstein derivative values at midpoint") {
    KnotVector kv({0, 0, 0, 1, 1, 1}, 2);
    const auto d = kv.eval_basis_ders(0.5, 1);
    CHECK(d(1, 0) == doctest::Approx(-1.0));
    CHECK(d(1, 1) == doctest::Approx(0.0));
    CHECK(d(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("partition of unity across degrees and parameters") {
    for (int p = 0; p <= 4; ++p) {
        KnotVector kv = (p == 3) ? KnotVector(kCubicKnots, 3) : KnotVector::uniform(p, 5);
        for (int k = 0; k <= 200; ++k) {
            const double u = k / 200.0;
            const auto d = kv.eval_basis_ders(u, 0);
            double sum = 0.0;
            for (int i = 0; i <= p; ++i) {
                sum += d(0, i);
                CHECK(d(0, i) >= -1e-14);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("analytic derivatives match central finite differences") {
    KnotVector kv(kCubicKnots, 3);
    const double h = 1e-6;
    for (double u : {0.11, 0.37, 0.55, 0.81, 0.93}) {
        const auto at = [&](double v) { return kv.eval_basis_ders(v, 0); };
        const auto d = kv.eval_basis_ders(u, 1);
        // same span for u-h .. u+h at these parameters
        const auto lo = at(u - h), hi = at(u + h);
        for (int i = 0; i <= 3; ++i) {
            const double fd = (hi(0, i) - lo(0, i)) / (2 * h);
            CHECK(d(1, i) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("knot insertion: hat refinement") {
    KnotVector kv({0, 0, 1, 1}, 1);
    auto [fine, T] = kv.insert_knot(0.5);
    CHECK(fine.basis_count() == 3);
    CHECK(fine.knots() == std::vector<double>{0, 0, 0.5, 1, 1});
    CHECK(T.rows() == 3);
    CHECK(T.cols() == 2);
}

TEST_CASE("knot insertion leaves the spline unchanged") {
    KnotVector kv(kCubicKnots, 3);
    Eigen::VectorXd coeffs(kv.basis_count());
    for (int i = 0; i < coeffs.size(); ++i)
        coeffs(i) = std::sin(1.7 * i) + 0.3 * std::cos(0.9 * i * i);

    KnotVector fine = kv;
    Eigen::VectorXd fine_coeffs = coeffs;
    for (double u : {0.1, 0.62, 0.62, 0.33, 0.9}) {
        auto [next, T] = fine.insert_knot(u);
        fine_coeffs = (T * fine_coeffs).eval();
        fine = next;
    }

    double max_err = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double u = k / 1000.0;
        max_err = std::max(max_err,
                           std::abs(spline_value(kv, coeffs, u) - spline_value(fine, fine_coeffs, u)));
    }
    CHECK(max_err < 1e-12);
}

TEST_CASE("knot insertion rejects multiplicity overflow") {
    KnotVector kv({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2);
    CHECK_THROWS_AS(kv.insert_knot(0.5), RefinementError);
    CHECK_THROWS_AS(kv.insert_knot(0.0), DomainError);
}

TEST_CASE("dyadic refinement multiplies element counts") {
    KnotVector kv = KnotVector::uniform(4, 1);
    auto [h1, T1] = kv.refine_dyadic(1);
    CHECK(h1.element_count() == 2);
    auto [h2, T2] = kv.refine_dyadic(2);
    CHECK(h2.element_count() == 4);
    CHECK(T2.rows() == h2.basis_count());
}

TEST_CASE("bezier extraction: bernstein vector is identity") {
    const auto ext = bezier_extract(KnotVector({0, 0, 0, 1, 1, 1}, 2));
    REQUIRE(ext.operators.size() == 1);
    CHECK((ext.operators[0] - Eigen::MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("bezier extraction: full interior multiplicity gives identities") {
    const auto ext = bezier_extract(KnotVector({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2));
    REQUIRE(ext.operators.size() == 2);
    for (const auto& C : ext.operators)
        CHECK((C - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("bezier extraction reproduces Cox-de Boor evaluation") {
    for (const KnotVector& kv :
         {KnotVector({0, 0, 0, 0.5, 1, 1, 1}, 2), KnotVector(kCubicKnots, 3),
          KnotVector::uniform(4, 3)}) {
        const auto ext = bezier_extract(kv);
        REQUIRE(static_cast<int>(ext.operators.size()) == kv.element_count());
        for (int k = 0; k <= 100; ++k) {
            const double u = k / 100.0;
            const int e = kv.element_of(u);
            const auto [a, b] = kv.element_bounds(e);
            const Eigen::MatrixXd bern = bernstein_ders(kv.degree(), (u - a) / (b - a), 0);
            const Eigen::VectorXd via_ext = ext.operators[e] * bern.row(0).transpose();
            const auto direct = kv.eval_basis_ders(u, 0);
            for (int i = 0; i <= kv.degree(); ++i)
                CHECK(via_ext(i) == doctest::Approx(direct(0, i)).epsilon(1e-13));
        }
    }
}

TEST_CASE("bezier extraction: example cubic vector has 4 element operators") {
    const auto ext = bezier_extract(KnotVector(kCubicKnots, 3));
    CHECK(ext.operators.size() == 4);
    // partition of unity transported through extraction
    for (const auto& C : ext.operators) {
        const Eigen::VectorXd colsum = C.colwise().sum();
        for (int j = 0; j < colsum.size(); ++j) CHECK(colsum(j) == doctest::Approx(1.0));
    }
}

TEST_CASE("tensor space index map is a bijection") {
    TensorSpace space{KnotVector::uniform(2, 3), KnotVector::uniform(3, 2)};
    CHECK(space.dim() == 5 * 5);
    for (int a = 0; a < space.dim(); ++a) {
        const auto [i, j] = space.unravel(a);
        CHECK(space.linear_index(i, j) == a);
    }
}

TEST_CASE("degree zero component vectors") {
    KnotVector kv = KnotVector::uniform(0, 4);
    CHECK(kv.basis_count() == 4);
    CHECK(kv.element_count() == 4);
    const auto d = kv.eval_basis_ders(0.3, 1);
    CHECK(d(0, 0) == doctest::Approx(1.0));
    CHECK(d(1, 0) == doctest::Approx(0.0));
    const auto ext = bezier_extract(kv);
    CHECK(ext.operators.size() == 4);
}
