#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "releq/potentials.hpp"
#include "test_support.hpp"

using namespace releq;
namespace rt = releq::testing;

TEST_CASE("potential spec validation") {
    CHECK_THROWS_AS(PotentialSpec::alpha_homogeneous(0.0), InvalidArgument);
    CHECK_THROWS_AS(PotentialSpec::alpha_homogeneous(2.0), InvalidArgument);
    CHECK_THROWS_AS(PotentialSpec::logarithmic().alpha(), WrongPotential);
    CHECK(PotentialSpec::alpha_homogeneous(1.0).alpha() == 1.0);
}

TEST_CASE("potential values on the unit triangle") {
    const BodySystem tri = rt::paper_triangle();
    for (double a : {0.5, 1.0, 1.5})
        CHECK(eval_potential(tri, PotentialSpec::alpha_homogeneous(a)) ==
              doctest::Approx(3.0).epsilon(1e-13));
    CHECK(eval_potential(tri, PotentialSpec::logarithmic()) ==
          doctest::Approx(0.0).epsilon(1e-13));

    // Two unit masses at distance 2 among three bodies: pair contributes 1/2
    // for alpha = 1.  Use a wide triangle and subtract the other two pairs.
    Eigen::VectorXd q(6);
    q << -1, 0, 1, 0, 0, 10;
    const BodySystem sys({1, 1, 1}, q);
    const double u = eval_potential(sys, PotentialSpec::alpha_homogeneous(1.0));
    const double r13 = (sys.body(0) - sys.body(2)).norm();
    const double r23 = (sys.body(1) - sys.body(2)).norm();
    CHECK(u - 1.0 / r13 - 1.0 / r23 == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("collision guard") {
    Eigen::VectorXd q(6);
    q << 0, 0, 1e-12, 0, 1, 1;
    const BodySystem sys({1, 1, 1}, q);
    CHECK_THROWS_AS(eval_potential(sys, PotentialSpec::alpha_homogeneous(1.0)), CollisionError);
    CHECK_THROWS_AS(grad_potential(sys, PotentialSpec::logarithmic()), CollisionError);
    CHECK_THROWS_AS(hess_potential(sys, PotentialSpec::logarithmic()), CollisionError);
}

TEST_CASE("gradient matches finite differences and the Euler identities") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const BodySystem sys = rt::random_system(rng, 4);
        for (const auto& spec : {PotentialSpec::alpha_homogeneous(0.7 + 0.1 * rep),
                                 PotentialSpec::logarithmic()}) {
            const Eigen::VectorXd g = grad_potential(sys, spec);
            const Eigen::VectorXd g_fd = rt::fd_gradient(sys, spec);
            CHECK((g - g_fd).norm() <= 1e-6 * g.norm());

            const double radial = g.dot(sys.positions());
            if (spec.is_log())
                CHECK(radial == doctest::Approx(-total_mass_product(sys)).epsilon(1e-11));
            else
                CHECK(radial ==
                      doctest::Approx(-spec.alpha() * eval_potential(sys, spec)).epsilon(1e-11));
        }
    }
}

TEST_CASE("gradient antisymmetry for two equal masses mirrored through the origin") {
    Eigen::VectorXd q(8);
    q << 1.2, 0.4, -1.2, -0.4, 3.0, 0.0, -3.0, 0.0;
    const BodySystem sys({1.5, 1.5, 0.7, 0.7}, q);
    const Eigen::VectorXd g = grad_potential(sys, PotentialSpec::alpha_homogeneous(1.0));
    CHECK((g.segment<2>(0) + g.segment<2>(2)).norm() <= 1e-12 * g.norm());
    CHECK((g.segment<2>(4) + g.segment<2>(6)).norm() <= 1e-12 * g.norm());
}

TEST_CASE("hessian matches finite differences") {
    std::mt19937_64 rng(29);
    const BodySystem sys = rt::random_system(rng, 3, 0.5);
    for (const auto& spec :
         {PotentialSpec::alpha_homogeneous(1.0), PotentialSpec::logarithmic()}) {
        const Eigen::MatrixXd H = hess_potential(sys, spec);
        const Eigen::MatrixXd H_fd = rt::fd_hessian(sys, spec);
        CHECK((H - H_fd).norm() <= 1e-6 * H.norm());
    }
}

TEST_CASE("hessian structure: symmetry, translation kernel, radial action") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 8; ++rep) {
        const BodySystem sys = rt::random_system(rng, 3 + rep % 3);
        const int dim = 2 * sys.count();
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < sys.count(); ++i) v[2 * i] = 1.0;
        const Eigen::MatrixXd K = complex_structure_K(sys.count());

        for (const auto& spec : {PotentialSpec::alpha_homogeneous(0.6 + 0.15 * rep),
                                 PotentialSpec::logarithmic()}) {
            const Eigen::MatrixXd H = hess_potential(sys, spec);
            CHECK((H - H.transpose()).norm() <= 1e-12 * H.norm());
            CHECK((H * v).norm() <= 1e-10 * H.norm());
            CHECK((H * (K * v)).norm() <= 1e-10 * H.norm());

            // D2U x = -(a+1) grad U (alpha), -grad U (log).
            const Eigen::VectorXd g = grad_potential(sys, spec);
            const double factor = spec.is_log() ? -1.0 : -(spec.alpha() + 1.0);
            CHECK((H * sys.positions() - factor * g).norm() <= 1e-10 * H.norm());

            // Rotational identity (Kx)^T D2U + (grad U)^T K = 0.
            const Eigen::RowVectorXd rot =
                (K * sys.positions()).transpose() * H + g.transpose() * K;
            CHECK(rot.norm() <= 1e-10 * H.norm());
        }

        // tr[M^-1 D2U_log] vanishes identically.
        Eigen::MatrixXd Hlog = hess_potential(sys, PotentialSpec::logarithmic());
        for (int i = 0; i < sys.count(); ++i) Hlog.middleRows(2 * i, 2) /= sys.masses()[i];
        CHECK(std::abs(Hlog.trace()) <= 1e-12 * Hlog.norm());
    }
}

TEST_CASE("potential homogeneity under rescaling") {
    std::mt19937_64 rng(37);
    const BodySystem sys = rt::random_system(rng, 4);
    const double c = 1.7;
    const BodySystem scaled = sys.with_positions(c * sys.positions());

    const auto ua = PotentialSpec::alpha_homogeneous(0.9);
    CHECK(eval_potential(scaled, ua) ==
          doctest::Approx(std::pow(c, -0.9) * eval_potential(sys, ua)).epsilon(1e-12));

    const auto ulog = PotentialSpec::logarithmic();
    CHECK(eval_potential(scaled, ulog) ==
          doctest::Approx(eval_potential(sys, ulog) - total_mass_product(sys) * std::log(c))
              .epsilon(1e-12));
}

TEST_CASE("small-alpha bridge towards the logarithmic potential") {
    // (U_alpha(q) - sum m_i m_j)/alpha ~ U_log(q) as alpha -> 0, tested at a
    // single small alpha with a loose tolerance.
    std::mt19937_64 rng(41);
    const BodySystem sys = rt::random_system(rng, 4);
    const double alpha = 1e-4;
    const double u_alpha = eval_potential(sys, PotentialSpec::alpha_homogeneous(alpha));
    const double u_log = eval_potential(sys, PotentialSpec::logarithmic());
    const double bridged = (u_alpha - total_mass_product(sys)) / alpha;
    CHECK(std::abs(bridged - u_log) <= 1e-3 * (1.0 + std::abs(u_log)));
}

TEST_CASE("multiplier on the reference triangle") {
    const BodySystem tri = rt::paper_triangle();
    for (double a : {0.5, 1.0, 1.5}) {
        CHECK(lambda_multiplier(tri, PotentialSpec::alpha_homogeneous(a)) ==
              doctest::Approx(3.0 * a).epsilon(1e-13));
        CHECK(angular_velocity(tri, PotentialSpec::alpha_homogeneous(a)) ==
              doctest::Approx(std::sqrt(3.0 * a)).epsilon(1e-13));
    }
    CHECK(lambda_multiplier(tri, PotentialSpec::logarithmic()) ==
          doctest::Approx(3.0).epsilon(1e-13));
    CHECK(angular_velocity(tri, PotentialSpec::logarithmic()) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("logarithmic multiplier depends only on the moment of inertia") {
    std::mt19937_64 rng(43);
    const BodySystem a = rt::random_system(rng, 4);
    BodySystem b = rt::random_system(rng, 4);
    // Rescale b to the inertia of a (masses differ; only I matters).
    b = b.with_positions(b.positions() *
                         std::sqrt(moment_of_inertia(a) / moment_of_inertia(b)));
    const double ma = total_mass_product(a), mb = total_mass_product(b);
    const double la = lambda_multiplier(a, PotentialSpec::logarithmic());
    const double lb = lambda_multiplier(b, PotentialSpec::logarithmic());
    CHECK(la / ma == doctest::Approx(lb / mb).epsilon(1e-12));
}

TEST_CASE("restricted hessian quadratic form") {
    const BodySystem tri = rt::paper_triangle();
    const auto spec = PotentialSpec::alpha_homogeneous(1.0);
    const Eigen::MatrixXd M = mass_matrix(tri.masses());
    const Eigen::MatrixXd K = complex_structure_K(3);

    SUBCASE("rotational direction is a zero mode") {
        const Eigen::VectorXd v = K * tri.positions();
        CHECK(std::abs(restricted_hessian_quadform(tri, spec, v)) <= 1e-10);
    }

    SUBCASE("guards fire") {
        const BodySystem off = tri.with_positions(2.0 * tri.positions());
        Eigen::VectorXd v = K * tri.positions();
        CHECK_THROWS_AS(restricted_hessian_quadform(off, spec, 2.0 * v), NotOnEllipsoid);
        CHECK_THROWS_AS(restricted_hessian_quadform(tri, spec, tri.positions()), NotTangent);
    }

    SUBCASE("log case equals the explicit formula") {
        std::mt19937_64 rng(47);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd v(6);
        for (int i = 0; i < 6; ++i) v[i] = gauss(rng);
        const Eigen::VectorXd Mq = M * tri.positions();
        v -= Mq.dot(v) / Mq.dot(tri.positions()) * tri.positions();  // make tangent
        const auto log_spec = PotentialSpec::logarithmic();
        const double got = restricted_hessian_quadform(tri, log_spec, v);
        const Eigen::MatrixXd H = hess_potential(tri, log_spec);
        const double expected =
            v.dot(H * v) + total_mass_product(tri) * v.dot(M * v);
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("matches a constrained finite-difference oracle on a pinching direction") {
        // Squeeze body 2 towards body 3, M-orthogonalized to be tangent.
        Eigen::VectorXd v(6);
        v << 0, 0, 0.5, 0, -0.5, 0;
        const Eigen::VectorXd Mq = M * tri.positions();
        v -= Mq.dot(v) / Mq.dot(tri.positions()) * tri.positions();

        const auto project = [&](const Eigen::VectorXd& q) {
            return q / std::sqrt(moment_of_inertia(tri.with_positions(q)));
        };
        const double h = 1e-4;
        const auto phi = [&](double s) {
            return eval_potential(tri.with_positions(project(tri.positions() + s * v)), spec);
        };
        const double fd = (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
        const double got = restricted_hessian_quadform(tri, spec, v);
        CHECK(got == doctest::Approx(fd).epsilon(1e-4));
    }
}
