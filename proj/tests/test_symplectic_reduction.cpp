#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "releq/symplectic_reduction.hpp"
#include "test_support.hpp"

using namespace releq;
namespace rt = releq::testing;

namespace {

struct Fixture {
    CentralConfiguration cc;
    LinearizedSystem lin;
    ReductionBasis basis;
    ReducedBlocks blocks;
};

Fixture make(const BodySystem& sys, const PotentialSpec& spec, unsigned seed = 0) {
    CentralConfiguration cc = verify_central_config(sys, spec);
    LinearizedSystem lin = build_linearization(cc);
    ReductionBasis basis = build_reduction(cc, lin, seed);
    ReducedBlocks blocks = restrict_blocks(basis, lin);
    return {std::move(cc), std::move(lin), std::move(basis), std::move(blocks)};
}

}  // namespace

TEST_CASE("C satisfies its defining constraints") {
    for (int n : {3, 4, 5}) {
        const auto fx = make(ngon_configuration(n), PotentialSpec::alpha_homogeneous(1.0));
        const Eigen::MatrixXd M = mass_matrix(fx.cc.sys.masses());
        const Eigen::MatrixXd K = complex_structure_K(n);
        const int dim = 2 * n;

        CHECK((fx.basis.C * K - K * fx.basis.C).norm() == 0.0);  // exact by construction
        CHECK((fx.basis.C.transpose() * M * fx.basis.C -
               Eigen::MatrixXd::Identity(dim, dim)).norm() <= 1e-10);

        // First four columns are the normalized (v, Kv, xbar, K xbar).
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < n; ++i) v[2 * i] = 1.0;
        const double vn = std::sqrt(v.dot(M * v));
        CHECK((fx.basis.C.col(0) - v / vn).norm() <= 1e-12);
        CHECK((fx.basis.C.col(1) - K * v / vn).norm() <= 1e-12);
        CHECK((fx.basis.C.col(2) - fx.cc.sys.positions()).norm() <= 1e-12);
        CHECK((fx.basis.C.col(3) - K * fx.cc.sys.positions()).norm() <= 1e-12);
    }
}

TEST_CASE("L acts on the E1 and E2 bases exactly as displayed") {
    for (const auto& spec :
         {PotentialSpec::alpha_homogeneous(0.8), PotentialSpec::logarithmic()}) {
        const auto fx = make(rt::paper_triangle(), spec);
        const double w = fx.cc.omega;
        const auto& E1 = fx.basis.E1;
        const auto& E2 = fx.basis.E2;
        const Eigen::MatrixXd& L = fx.lin.L;
        const double scale = L.norm();

        CHECK((L * E1.col(0) - w * E1.col(1)).norm() <= 1e-12 * scale);
        CHECK((L * E1.col(1) + w * E1.col(0)).norm() <= 1e-12 * scale);
        CHECK((L * E1.col(2) - E1.col(0) - w * E1.col(3)).norm() <= 1e-12 * scale);
        CHECK((L * E1.col(3) - E1.col(1) + w * E1.col(2)).norm() <= 1e-12 * scale);

        const double radial = spec.is_log() ? w * w : (spec.alpha() + 1.0) * w * w;
        CHECK((L * E2.col(0) - w * E2.col(1) - radial * E2.col(2)).norm() <= 1e-12 * scale);
        CHECK((L * E2.col(1) + w * E2.col(0) + w * w * E2.col(3)).norm() <= 1e-12 * scale);
        CHECK((L * E2.col(2) - E2.col(0) - w * E2.col(3)).norm() <= 1e-12 * scale);
        CHECK((L * E2.col(3) - E2.col(1) + w * E2.col(2)).norm() <= 1e-12 * scale);
    }
}

TEST_CASE("symplectic pairing is non-degenerate on E1 and on E2") {
    for (int n : {3, 4, 6}) {
        const auto fx = make(ngon_configuration(n), PotentialSpec::alpha_homogeneous(0.9));
        const Eigen::MatrixXd J = standard_J(4 * n);
        for (const Eigen::MatrixXd* basis : {&fx.basis.E1, &fx.basis.E2}) {
            Eigen::MatrixXd gram(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    gram(i, j) = (J * basis->col(i)).dot(basis->col(j));
            CHECK((gram + gram.transpose()).norm() <= 1e-12 * gram.norm());
            double hadamard = 1.0;
            for (int r = 0; r < 4; ++r) hadamard *= gram.row(r).norm();
            CHECK(std::abs(gram.determinant()) > 1e-10 * hadamard);
        }
    }
}

TEST_CASE("E3 is symplectically orthogonal to E1 and E2 and L-invariant") {
    for (int n : {3, 4, 5}) {
        const auto fx = make(ngon_configuration(n), PotentialSpec::logarithmic());
        const Eigen::MatrixXd J = standard_J(4 * n);
        CHECK(fx.basis.E3.cols() == 4 * n - 8);

        for (Eigen::Index e = 0; e < fx.basis.E3.cols(); ++e)
            for (int f = 0; f < 4; ++f) {
                CHECK(std::abs((J * fx.basis.E3.col(e)).dot(fx.basis.E1.col(f))) <= 1e-10);
                CHECK(std::abs((J * fx.basis.E3.col(e)).dot(fx.basis.E2.col(f))) <= 1e-10);
            }

        // Expressing L in the full (E1|E2|E3) basis must leave no coupling
        // from E3 into E1+E2.
        Eigen::MatrixXd full(4 * n, 4 * n);
        full << fx.basis.E1, fx.basis.E2, fx.basis.E3;
        const Eigen::MatrixXd rep = full.colPivHouseholderQr().solve(fx.lin.L * full);
        CHECK(rep.topRightCorner(8, 4 * n - 8).norm() <= 1e-9 * fx.lin.L.norm());
        CHECK(rep.bottomLeftCorner(4 * n - 8, 8).norm() <= 1e-9 * fx.lin.L.norm());
    }
}

TEST_CASE("restricted L1 and L2 match the displayed 4x4 matrices") {
    for (const auto& spec :
         {PotentialSpec::alpha_homogeneous(1.3), PotentialSpec::logarithmic()}) {
        for (int n : {3, 4}) {
            const auto fx = make(ngon_configuration(n), spec);
            const double w = fx.cc.omega;

            Eigen::MatrixXd L1(4, 4);
            L1 << 0, -w, 1, 0,
                  w, 0, 0, 1,
                  0, 0, 0, -w,
                  0, 0, w, 0;
            CHECK((fx.blocks.L1 - L1).norm() <= 1e-10 * (1.0 + w));

            const double radial = spec.is_log() ? w * w : (spec.alpha() + 1.0) * w * w;
            Eigen::MatrixXd L2(4, 4);
            L2 << 0, -w, 1, 0,
                  w, 0, 0, 1,
                  radial, 0, 0, -w,
                  0, -w * w, w, 0;
            CHECK((fx.blocks.L2 - L2).norm() <= 1e-10 * (1.0 + w * w));
        }
    }
}

TEST_CASE("table of the first eight eigenvalues") {
    for (const auto& spec :
         {PotentialSpec::alpha_homogeneous(0.6), PotentialSpec::logarithmic()}) {
        for (int n : {3, 4}) {
            const auto fx = make(ngon_configuration(n), spec);
            const double w = fx.cc.omega;
            const Complex iw(0.0, w);

            const std::vector<Complex> expected1 = {iw, iw, -iw, -iw};
            CHECK(max_matched_distance(refined_eigenvalues_of(fx.blocks.L1), expected1) <= 1e-8);

            const double shifted = spec.is_log() ? w * std::sqrt(2.0)
                                                 : w * std::sqrt(2.0 - spec.alpha());
            const std::vector<Complex> expected2 = {0.0, 0.0, Complex(0.0, shifted),
                                                    Complex(0.0, -shifted)};
            CHECK(max_matched_distance(refined_eigenvalues_of(fx.blocks.L2), expected2) <= 1e-8);
        }
    }
}

TEST_CASE("L1 and L2 are not diagonalizable (geometric multiplicity 1)") {
    const auto fx = make(rt::paper_triangle(), PotentialSpec::alpha_homogeneous(1.0));
    const double w = fx.cc.omega;

    const auto geometric = [](const Eigen::MatrixXd& m, Complex lambda) {
        const Eigen::MatrixXcd shifted =
            m.cast<Complex>() - lambda * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > 1e-9 * sv[0]) ++rank;
        return static_cast<int>(m.cols()) - rank;
    };

    CHECK(geometric(fx.blocks.L1, Complex(0.0, w)) == 1);   // algebraic 2
    CHECK(geometric(fx.blocks.L1, Complex(0.0, -w)) == 1);
    CHECK(geometric(fx.blocks.L2, Complex(0.0, 0.0)) == 1); // algebraic 2
}

TEST_CASE("multiset spectral splitting sigma(L) = sigma(L1)+sigma(L2)+sigma(L3)") {
    for (const auto& spec :
         {PotentialSpec::alpha_homogeneous(1.0), PotentialSpec::logarithmic()}) {
        for (int n : {3, 4, 5, 6}) {
            const auto fx = make(ngon_configuration(n), spec);
            auto combined = eigenvalues_of(fx.blocks.L1);
            for (const auto& z : eigenvalues_of(fx.blocks.L2)) combined.push_back(z);
            for (const auto& z : eigenvalues_of(fx.blocks.L3)) combined.push_back(z);
            const auto whole = eigenvalues_of(fx.lin.L);
            CHECK(max_matched_distance(whole, combined) <=
                  1e-7 * spectral_radius(whole));
        }
    }
}

TEST_CASE("triangle essential spectrum matches the closed forms") {
    for (double alpha : {0.5, 1.0, 1.5}) {
        const auto fx = make(rt::paper_triangle(), PotentialSpec::alpha_homogeneous(alpha));
        const auto full = rt::paper_triangle_spectrum_alpha(alpha);
        const std::vector<Complex> essential(full.begin() + 8, full.end());
        CHECK(max_matched_distance(refined_eigenvalues_of(fx.blocks.L3), essential) <= 1e-8);
    }
    const auto fx = make(rt::paper_triangle(), PotentialSpec::logarithmic());
    const auto full = rt::paper_triangle_spectrum_log();
    const std::vector<Complex> essential(full.begin() + 8, full.end());
    CHECK(max_matched_distance(refined_eigenvalues_of(fx.blocks.L3), essential) <= 1e-8);
}

TEST_CASE("two random completions of C give the same essential spectrum") {
    for (int n : {3, 5}) {
        for (const auto& spec :
             {PotentialSpec::alpha_homogeneous(1.0), PotentialSpec::logarithmic()}) {
            const auto first = make(ngon_configuration(n), spec, 1);
            const auto second = make(ngon_configuration(n), spec, 42);
            CHECK(max_matched_distance(refined_eigenvalues_of(first.blocks.L3),
                                       refined_eigenvalues_of(second.blocks.L3)) <= 1e-8);
        }
    }
}

TEST_CASE("B3 symmetric and N3 reproduces its inertia by congruence") {
    for (int n : {3, 4, 5}) {
        const auto fx = make(ngon_configuration(n), PotentialSpec::logarithmic());
        CHECK((fx.blocks.B3 - fx.blocks.B3.transpose()).norm() <=
              1e-12 * fx.blocks.B3.norm());

        const int ess = 2 * n - 4;
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2 * ess, 2 * ess);
        expected.topLeftCorner(ess, ess) =
            -(fx.blocks.D_block +
              fx.cc.omega * fx.cc.omega * Eigen::MatrixXd::Identity(ess, ess));
        expected.bottomRightCorner(ess, ess) = Eigen::MatrixXd::Identity(ess, ess);
        CHECK((fx.blocks.N3 - expected).norm() <= 1e-10 * (1.0 + fx.blocks.B3.norm()));

        const Inertia of_B3 = inertia_of(fx.blocks.B3);
        const Inertia of_N3 = inertia_of(fx.blocks.N3);
        CHECK(of_B3.n_minus == of_N3.n_minus);
        CHECK(of_B3.nullity == of_N3.nullity);
        CHECK(of_B3.n_plus == of_N3.n_plus);
    }
}

TEST_CASE("essential hessian dimensions and synthetic inertia") {
    const auto fx = make(rt::paper_triangle(), PotentialSpec::alpha_homogeneous(1.0));
    const auto ess = essential_hessian(fx.blocks);
    CHECK(ess.H.rows() == 2);  // 2n - 4 for n = 3
    CHECK(ess.morse_index + ess.nullity <= 2);

    // Synthetic D with prescribed inertia routed through the same reader.
    std::mt19937_64 rng(71);
    ReducedBlocks fake;
    fake.omega = 0.0;
    fake.D_block = rt::prescribed_inertia_matrix(rng, 2, 1, 3);
    const auto aug = essential_hessian(fake);
    CHECK(aug.morse_index == 2);
    CHECK(aug.nullity == 1);
}

TEST_CASE("log triangle essential nullity is even") {
    const auto fx = make(rt::paper_triangle(), PotentialSpec::logarithmic());
    const auto ess = essential_hessian(fx.blocks);
    CHECK(ess.nullity % 2 == 0);
}
