#include <doctest.h>

#include "safeloop/sampling.hpp"
#include "safeloop/sets.hpp"

using namespace safeloop;

namespace
{

Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0)
{
    std::uniform_real_distribution<double> unif(-scale, scale);
    Mat M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        for (Eigen::Index j = 0; j < c; ++j)
        {
            M(i, j) = unif(rng);
        }
    }
    return M;
}

/// Random nonempty constrained zonotope: constraints are anchored at an
/// interior factor point so the factor polytope cannot be empty.
ConZonotope random_czono(Rng& rng, Eigen::Index n, Eigen::Index s, Eigen::Index q)
{
    ConZonotope C;
    C.c = random_mat(rng, n, 1, 1.0);
    C.G = random_mat(rng, n, s, 1.0);
    C.A = random_mat(rng, q, s, 1.0);
    const Vec z0 = 0.5 * sample_unit_box(rng, s);
    C.b = C.A * z0;
    return C;
}

}  // namespace

TEST_CASE("constructors enforce shape invariants")
{
    CHECK_THROWS_AS(ConZonotope(Vec::Zero(2), Mat::Zero(3, 1)), std::invalid_argument);
    CHECK_THROWS_AS(ConZonotope(Vec::Zero(2), Mat::Zero(2, 2), Mat::Zero(1, 3), Vec::Zero(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ConZonotope(Vec::Zero(2), Mat::Zero(2, 2), Mat::Zero(2, 2), Vec::Zero(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ConMatrixZonotope(Mat::Zero(2, 2), {Mat::Zero(2, 3)}),
                    std::invalid_argument);
}

TEST_CASE("from_box keeps zero-width generators aligned")
{
    Vec lo(3), hi(3);
    lo << -1, 2, -0.5;
    hi << 1, 2, 0.5;
    const Zonotope Z = from_box(lo, hi);
    CHECK(Z.num_gens() == 3);  // one per coordinate, even the fixed one
    CHECK(Z.c(1) == doctest::Approx(2.0));
    CHECK(Z.G.col(1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK_THROWS_AS(from_box(hi, lo), std::invalid_argument);
}

TEST_CASE("interval_matrix_zonotope: row-major, exact entries skipped")
{
    Mat lo(2, 2), hi(2, 2);
    lo << 0, 1, -2, 5;
    hi << 2, 1, 0, 7;
    const MatrixZonotope M = interval_matrix_zonotope(lo, hi);
    CHECK(M.num_gens() == 3);  // entry (0,1) is exact
    CHECK(M.C(0, 0) == doctest::Approx(1.0));
    CHECK(M.C(1, 1) == doctest::Approx(6.0));
    // row-major order: (0,0), (1,0), (1,1)
    CHECK(M.G[0](0, 0) == doctest::Approx(1.0));
    CHECK(M.G[1](1, 0) == doctest::Approx(1.0));
    CHECK(M.G[2](1, 1) == doctest::Approx(1.0));
}

TEST_CASE("member_point: direct examples and witness")
{
    // unit box in the plane
    const ConZonotope box = to_constrained(from_box(Vec::Constant(2, -1), Vec::Constant(2, 1)));
    Vec inside(2), outside(2);
    inside << 0.3, -0.9;
    outside << 1.5, 0.0;
    CHECK(member_point(box, inside).member);
    CHECK_FALSE(member_point(box, outside).member);
    const Membership m = member_point(box, inside);
    CHECK((box.G * m.witness + box.c - inside).cwiseAbs().maxCoeff() < 1e-6);
    CHECK_THROWS_AS(member_point(box, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("member_point: constructive witness on constrained sets")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const ConZonotope C = random_czono(rng, 2, 5, 2);
        FactorSampler fs(C.A, C.b, 5);
        const Vec z = fs.next(rng);
        const Vec x = C.G * z + C.c;
        CHECK(member_point(C, x).member);
        // far outside the generator range cannot be a member
        const Vec far = C.c + Vec::Constant(2, 100.0);
        CHECK_FALSE(member_point(C, far).member);
    }
}

TEST_CASE("minkowski_sum: exactness by sampled membership equivalence")
{
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial)
    {
        const ConZonotope C1 = random_czono(rng, 2, 4, 1);
        const ConZonotope C2 = random_czono(rng, 2, 3, 1);
        const ConZonotope S = minkowski_sum(C1, C2);
        CHECK(S.num_gens() == 7);
        CHECK(S.num_cons() == 2);
        MemberSampler s1(C1), s2(C2), ss(S);
        for (int i = 0; i < 30; ++i)
        {
            // members add up to a member
            CHECK(member_point(S, s1.next(rng) + s2.next(rng)).member);
            // every member of the sum splits into feasible halves
            const Vec z = ss.next(rng);
            const Membership m = member_point(S, z);
            REQUIRE(m.member);
            const Vec z1 = m.witness.head(4);
            const Vec z2 = m.witness.tail(3);
            CHECK(member_point(C1, C1.G * z1 + C1.c).member);
            CHECK(member_point(C2, C2.G * z2 + C2.c).member);
            CHECK((C1.G * z1 + C1.c + C2.G * z2 + C2.c - z).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    CHECK_THROWS_AS(minkowski_sum(random_czono(rng, 2, 2, 0), random_czono(rng, 3, 2, 0)),
                    std::invalid_argument);
}

TEST_CASE("map and map_to_vector: exactness under right-multiplication")
{
    Rng rng(17);
    ConMatrixZonotope M;
    M.C = random_mat(rng, 2, 3);
    for (int i = 0; i < 3; ++i)
    {
        M.G.push_back(random_mat(rng, 2, 3));
    }
    M.Ac = {random_mat(rng, 1, 3), random_mat(rng, 1, 3), random_mat(rng, 1, 3)};
    // anchor the constraint at zeta = (0.2, -0.1, 0.4)
    Vec z0(3);
    z0 << 0.2, -0.1, 0.4;
    M.Bc = z0(0) * M.Ac[0] + z0(1) * M.Ac[1] + z0(2) * M.Ac[2];

    const Mat N = random_mat(rng, 3, 2);
    const ConMatrixZonotope MN = map(M, N);
    const Vec nvec = random_mat(rng, 3, 1);
    const ConZonotope Mv = map_to_vector(M, nvec);
    for (int i = 0; i < 40; ++i)
    {
        const Mat X = sample_member(M, rng);
        CHECK(member_matrix(MN, Mat(X * N)).member);
        CHECK(member_point(Mv, Vec(X * nvec)).member);
    }
    // reverse: members of the image pull back (same factors describe both)
    for (int i = 0; i < 40; ++i)
    {
        const Mat Y = sample_member(MN, rng);
        CHECK(member_matrix(MN, Y).member);
    }
    CHECK_THROWS_AS(map(M, Mat::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("concat_T: independent columns, (column, generator) ordering")
{
    Rng rng(23);
    const ConZonotope Zw = random_czono(rng, 2, 2, 1);
    const int T = 3;
    const ConMatrixZonotope M = concat_T(Zw, T);
    CHECK(M.num_gens() == T * Zw.num_gens());
    CHECK(M.rows() == 2);
    CHECK(M.cols() == T);
    // generator (t, i) touches only column t
    for (int t = 0; t < T; ++t)
    {
        for (int i = 0; i < 2; ++i)
        {
            const Mat& Gti = M.G[static_cast<size_t>(t * 2 + i)];
            CHECK((Gti.col(t) - Zw.G.col(i)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
            for (int u = 0; u < T; ++u)
            {
                if (u != t)
                {
                    CHECK(Gti.col(u).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
                }
            }
        }
    }
    // every stack of independent samples is a member, column-wise
    MemberSampler ws(Zw);
    for (int rep = 0; rep < 20; ++rep)
    {
        Mat W(2, T);
        for (int t = 0; t < T; ++t)
        {
            W.col(t) = ws.next(rng);
        }
        CHECK(member_matrix(M, W).member);
    }
    CHECK_THROWS_AS(concat_T(Zw, 0), std::invalid_argument);
}

TEST_CASE("intersect: sampled double-membership equivalence")
{
    Rng rng(31);
    // two overlapping interval matrix sets
    Mat lo1(2, 2), hi1(2, 2), lo2(2, 2), hi2(2, 2);
    lo1 << -1, -1, -1, -1;
    hi1 << 1, 1, 1, 1;
    lo2 = lo1.array() + 0.5;
    hi2 = hi1.array() + 0.5;
    const ConMatrixZonotope M1 = to_constrained(interval_matrix_zonotope(lo1, hi1));
    const ConMatrixZonotope M2 = to_constrained(interval_matrix_zonotope(lo2, hi2));
    const ConMatrixZonotope I = intersect(M1, M2);
    CHECK(I.num_gens() == M1.num_gens() + M2.num_gens());
    for (int rep = 0; rep < 60; ++rep)
    {
        const Mat X = sample_member(I, rng);
        CHECK(member_matrix(M1, X).member);
        CHECK(member_matrix(M2, X).member);
    }
    // members of both operands belong to the intersection
    for (int rep = 0; rep < 60; ++rep)
    {
        const Mat X = sample_member(M1, rng);
        const bool in_both = member_matrix(M2, X).member;
        CHECK(member_matrix(I, X).member == in_both);
    }
}

TEST_CASE("scale_level_set")
{
    Rng rng(37);
    const ConZonotope C = random_czono(rng, 2, 4, 1);
    SUBCASE("lambda = 1 is the identity")
    {
        const ConZonotope S = scale_level_set(C, 1.0);
        CHECK((S.G - C.G).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK((S.b - C.b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("unit box halves")
    {
        const ConZonotope box =
            to_constrained(from_box(Vec::Constant(2, -1), Vec::Constant(2, 1)));
        const ConZonotope half = scale_level_set(box, 0.5);
        CHECK(member_point(half, Vec::Constant(2, 0.49)).member);
        CHECK_FALSE(member_point(half, Vec::Constant(2, 0.6)).member);
    }
    SUBCASE("membership scales about the center for constraint-free sets")
    {
        Zonotope Z;
        Z.c = random_mat(rng, 2, 1);
        Z.G = random_mat(rng, 2, 4);
        const ConZonotope full = to_constrained(Z);
        const ConZonotope scaled = scale_level_set(full, 0.7);
        MemberSampler fs(full);
        for (int i = 0; i < 40; ++i)
        {
            const Vec x = fs.next(rng);
            const Vec xs = Z.c + 0.7 * (x - Z.c);
            CHECK(member_point(scaled, xs).member);
            CHECK(member_point(full, (xs - Z.c) / 0.7 + Z.c).member);
        }
    }
    SUBCASE("invalid lambda")
    {
        CHECK_THROWS_AS(scale_level_set(C, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(scale_level_set(C, 1.5), std::invalid_argument);
    }
}

TEST_CASE("scale_level_set: monotone containment on constraint-free sets")
{
    Rng rng(41);
    Zonotope Z;
    Z.c = random_mat(rng, 2, 1);
    Z.G = random_mat(rng, 2, 3);
    const ConZonotope base = to_constrained(Z);
    const ConZonotope small = scale_level_set(base, 0.4);
    const ConZonotope large = scale_level_set(base, 0.8);
    CHECK(contains(small, large).has_value());
}

TEST_CASE("product: over-approximation of the matrix-vector image")
{
    Rng rng(43);
    SUBCASE("singletons map to the singleton product")
    {
        const Mat A = random_mat(rng, 2, 2);
        const Vec x = random_mat(rng, 2, 1);
        const ConMatrixZonotope M(A, {});
        const ConZonotope C(x, Mat::Zero(2, 0));
        const ConZonotope R = product(M, C);
        CHECK((R.c - A * x).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(member_point(R, Vec(A * x)).member);
    }
    SUBCASE("identity matrix set reproduces the vector set")
    {
        const ConMatrixZonotope M(Mat::Identity(2, 2), {});
        const ConZonotope C = random_czono(rng, 2, 3, 1);
        const ConZonotope R = product(M, C);
        MemberSampler cs(C);
        for (int i = 0; i < 30; ++i)
        {
            CHECK(member_point(R, cs.next(rng)).member);
        }
    }
    SUBCASE("sampled products always land inside")
    {
        Mat lo(2, 2), hi(2, 2);
        lo << 0.4, -0.2, 0.1, 0.8;
        hi << 0.6, 0.0, 0.3, 1.0;
        const ConMatrixZonotope M = to_constrained(interval_matrix_zonotope(lo, hi));
        const ConZonotope C = random_czono(rng, 2, 3, 1);
        const ConZonotope R = product(M, C);
        MemberSampler cs(C);
        for (int i = 0; i < 60; ++i)
        {
            const Mat X = sample_member(M, rng);
            const Vec x = cs.next(rng);
            CHECK(member_point(R, Vec(X * x)).member);
        }
    }
}

TEST_CASE("contains: certificates and refusals")
{
    SUBCASE("unit disk-box inside its double")
    {
        const ConZonotope inner(Vec::Zero(2), Mat::Identity(2, 2));
        const ConZonotope outer(Vec::Zero(2), 2.0 * Mat::Identity(2, 2));
        const auto cert = contains(inner, outer);
        REQUIRE(cert.has_value());
        CHECK((cert->Gamma - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(cert->L.cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("every set contains itself")
    {
        Rng rng(47);
        const ConZonotope C = random_czono(rng, 2, 4, 1);
        CHECK(contains(C, C).has_value());
    }
    SUBCASE("the double box is not inside the unit box")
    {
        const ConZonotope inner(Vec::Zero(2), 2.0 * Mat::Identity(2, 2));
        const ConZonotope outer(Vec::Zero(2), Mat::Identity(2, 2));
        CHECK_FALSE(contains(inner, outer).has_value());
        // sampling finds an actual violation
        Rng rng(53);
        MemberSampler s(inner);
        bool found = false;
        for (int i = 0; i < 200 && !found; ++i)
        {
            found = !member_point(outer, s.next(rng)).member;
        }
        CHECK(found);
    }
}

TEST_CASE("contains: soundness on constructed constrained pairs")
{
    // inner built from the outer through feasible multipliers, so a
    // certificate must exist and sampling must confirm it
    Rng rng(59);
    for (int trial = 0; trial < 10; ++trial)
    {
        ConZonotope outer;
        outer.c = random_mat(rng, 2, 1);
        outer.G = random_mat(rng, 2, 5);
        outer.A = random_mat(rng, 1, 5);
        const Eigen::Index s2 = outer.num_gens();
        const Mat Gamma0 = 0.25 * random_mat(rng, s2, 3);
        const Vec L0 = 0.2 * random_mat(rng, s2, 1);
        const Vec z_in = 0.9 * sample_unit_box(rng, 3);
        // both factor polytopes anchored at compatible points, so the
        // multiplier conditions hold with P = I and neither set is empty
        outer.b = outer.A * (Gamma0 * z_in + L0);
        ConZonotope inner;
        inner.G = outer.G * Gamma0;
        inner.c = outer.c + outer.G * L0;
        inner.A = outer.A * Gamma0;
        inner.b = outer.A * (Gamma0 * z_in);
        const auto cert = contains(inner, outer);
        REQUIRE(cert.has_value());
        MemberSampler is(inner);
        for (int i = 0; i < 50; ++i)
        {
            CHECK(member_point(outer, is.next(rng)).member);
        }
    }
}

TEST_CASE("prune_zero_columns drops only dead columns")
{
    ConZonotope C;
    C.c = Vec::Zero(2);
    C.G = Mat::Zero(2, 3);
    C.G(0, 0) = 1.0;
    C.G(1, 2) = 2.0;
    C.A = Mat::Zero(1, 3);
    C.A(0, 1) = 1.0;  // column 1 has a zero generator but a live constraint
    C.b = Vec::Zero(1);
    const ConZonotope P = prune_zero_columns(C);
    CHECK(P.num_gens() == 3);  // nothing to drop
    C.A(0, 1) = 0.0;
    const ConZonotope P2 = prune_zero_columns(C);
    CHECK(P2.num_gens() == 2);
}

TEST_CASE("stacked views flatten generators and constraints consistently")
{
    Rng rng(61);
    ConMatrixZonotope M;
    M.C = random_mat(rng, 2, 3);
    M.G = {random_mat(rng, 2, 3), random_mat(rng, 2, 3)};
    M.Ac = {random_mat(rng, 1, 3), random_mat(rng, 1, 3)};
    M.Bc = random_mat(rng, 1, 3);
    const Mat Gs = stacked_generator_matrix(M);
    const Mat As = stacked_constraint_matrix(M);
    const Vec bs = stacked_constraint_rhs(M);
    CHECK(Gs.rows() == 6);
    CHECK(Gs.cols() == 2);
    CHECK((Gs.col(0) - vectorize(M.G[0])).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK((As.col(1) - vectorize(M.Ac[1])).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK((bs - vectorize(M.Bc)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}
