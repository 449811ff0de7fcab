#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sparseode/simulation.hpp"

using namespace sparseode;

TEST_CASE("generated systems have the block-rotation shape") {
    Rng rng(2024);
    const LinearSystem sys = generate_system(100, rng);
    REQUIRE(sys.p() == 20);
    REQUIRE(sys.m0.size() == 20);
    for (int k = 0; k < 10; ++k) {
        const int i = 2 * k;
        const double a = sys.A(i, i);
        const double b = sys.A(i, i + 1);
        CHECK(a > -4.0);
        CHECK(a < 0.0);
        CHECK(b > -10.0);
        CHECK(b < 10.0);
        CHECK(sys.A(i + 1, i + 1) == a);
        CHECK(sys.A(i + 1, i) == -b);
    }
    for (int r = 0; r < 20; ++r) {
        int nz = 0;
        for (int c = 0; c < 20; ++c)
            if (sys.A(r, c) != 0.0) ++nz;
        CHECK(nz == 2);  // a_i and the off-diagonal partner
        // off-block entries exactly zero
        for (int c = 0; c < 20; ++c)
            if (c / 2 != r / 2) CHECK(sys.A(r, c) == 0.0);
    }
    for (int j = 0; j < 20; ++j) {
        CHECK(sys.m0[j] >= 0.0);
        CHECK(sys.m0[j] < 1.0);
    }
}

TEST_CASE("fixed seed reproduces the system bitwise") {
    Rng r1(99), r2(99);
    const LinearSystem s1 = generate_system(64, r1);
    const LinearSystem s2 = generate_system(64, r2);
    CHECK((s1.A - s2.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s1.m0 - s2.m0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single Euler updates by hand") {
    LinearSystem decay;
    decay.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    decay.m0 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd t1(1);
    t1 << 0.1;
    const Eigen::MatrixXd out = euler_solve(decay, 0.1, t1);
    CHECK(out(0, 0) == 0.9);

    LinearSystem rot;
    rot.A = Eigen::MatrixXd(2, 2);
    rot.A << 0.0, 1.0, -1.0, 0.0;
    rot.m0 = Eigen::VectorXd(2);
    rot.m0 << 1.0, 0.0;
    const Eigen::MatrixXd rout = euler_solve(rot, 0.1, t1);
    CHECK(rout(0, 0) == 1.0);
    CHECK(rout(0, 1) == -0.1);
}

TEST_CASE("requested times before the first step return the initial state") {
    LinearSystem decay;
    decay.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    decay.m0 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd t(2);
    t << 0.0, 0.05;
    const Eigen::MatrixXd out = euler_solve(decay, 0.1, t);
    CHECK(out(0, 0) == 1.0);
    CHECK(out(1, 0) == 1.0);  // 0.05 is before the first completed step
}

TEST_CASE("Euler global error is first order") {
    LinearSystem decay;
    decay.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    decay.m0 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd t1(1);
    t1 << 1.0;
    const double exact = std::exp(-1.0);
    const double e1 = std::abs(euler_solve(decay, 1e-3, t1)(0, 0) - exact);
    const double e2 = std::abs(euler_solve(decay, 5e-4, t1)(0, 0) - exact);
    CHECK(e1 / e2 > 1.6);
    CHECK(e1 / e2 < 2.4);
}

TEST_CASE("Euler matches the closed-form block solution") {
    LinearSystem sys;
    sys.A = Eigen::MatrixXd(2, 2);
    const double a = -1.7, b = 6.3;
    sys.A << a, b, -b, a;
    sys.m0 = Eigen::VectorXd(2);
    sys.m0 << 0.8, 0.35;
    Eigen::VectorXd times(3);
    times << 0.25, 0.5, 1.0;
    const Eigen::MatrixXd out = euler_solve(sys, 1e-5, times);
    for (int i = 0; i < 3; ++i) {
        double x1, x2;
        oracle::rotation_block_solution(a, b, sys.m0[0], sys.m0[1], times[i], x1, x2);
        CHECK(std::abs(out(i, 0) - x1) < 1e-3);
        CHECK(std::abs(out(i, 1) - x2) < 1e-3);
    }
}

TEST_CASE("generated dynamics stay bounded under the fine default step") {
    for (unsigned long long seed : {1ULL, 2ULL, 3ULL}) {
        Rng rng(seed);
        const LinearSystem sys = generate_system(100, rng);
        Eigen::VectorXd times(20);
        for (int i = 0; i < 20; ++i) times[i] = (i + 1) / 20.0;
        const Eigen::MatrixXd traj = euler_solve(sys, 1e-3, times);
        const double m0n = sys.m0.norm();
        for (int i = 0; i < 20; ++i) CHECK(traj.row(i).norm() <= 2.0 * m0n);
    }
}

TEST_CASE("state blowup is reported with the step index") {
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, 1e300);
    sys.m0 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd t1(1);
    t1 << 1.0;
    CHECK_THROWS_AS(euler_solve(sys, 0.01, t1), NonFinite);
}

TEST_CASE("aligned step divides the observation spacing") {
    CHECK(aligned_euler_step(100, 1e-4) == doctest::Approx(1e-4).epsilon(1e-15));
    const double s = aligned_euler_step(64, 1e-4);
    CHECK(s <= 1e-4 + 1e-18);
    const double m = 1.0 / (64.0 * s);
    CHECK(std::abs(m - std::round(m)) < 1e-9);
    CHECK(aligned_euler_step(10, 0.5) == doctest::Approx(0.1));
}

TEST_CASE("observation noise is calibrated and reproducible") {
    const Eigen::MatrixXd traj = Eigen::MatrixXd::Zero(1000, 100);
    Eigen::VectorXd times(1000);
    for (int i = 0; i < 1000; ++i) times[i] = (i + 1) / 1000.0;

    Rng rng(31337);
    const TimeSeries noisy = observe(traj, times, 0.1, rng);
    double ss = 0.0, mean = noisy.values.mean();
    for (int r = 0; r < 1000; ++r)
        for (int c = 0; c < 100; ++c)
            ss += (noisy.values(r, c) - mean) * (noisy.values(r, c) - mean);
    const double sd = std::sqrt(ss / (1000.0 * 100.0 - 1.0));
    CHECK(sd >= 0.098);
    CHECK(sd <= 0.102);

    Rng r2(31337);
    const TimeSeries again = observe(traj, times, 0.1, r2);
    CHECK((noisy.values - again.values).cwiseAbs().maxCoeff() == 0.0);

    Rng r3(1);
    const TimeSeries clean = observe(traj, times, 0.0, r3);
    CHECK(clean.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config validation bounds") {
    SimConfig sim;
    CHECK_NOTHROW(sim.validate());
    sim.n = 5;
    CHECK_THROWS_AS(sim.validate(), ConfigError);
    sim.n = 100;
    sim.euler_step = 0.5;  // > 1/n
    CHECK_THROWS_AS(sim.validate(), ConfigError);
    sim.euler_step = 1e-4;
    sim.sigma = -0.1;
    CHECK_THROWS_AS(sim.validate(), ConfigError);
}

TEST_CASE("one replicate is a deterministic function of its inputs") {
    SimConfig sim;
    sim.n = 50;
    sim.replicates = 1;
    sim.seed = 7;
    EstimatorConfig est;
    const ReplicateOutcome r1 = run_replicate(sim, est, 0);
    const ReplicateOutcome r2 = run_replicate(sim, est, 0);
    REQUIRE(r1.ok);
    REQUIRE(r2.ok);
    CHECK(r1.stream_seed == r2.stream_seed);
    CHECK(r1.lambda_scad == r2.lambda_scad);
    for (size_t e = 0; e < 5; ++e) {
        REQUIRE(r1.estimators[e].ok == r2.estimators[e].ok);
        if (r1.estimators[e].ok)
            CHECK((r1.estimators[e].beta - r2.estimators[e].beta)
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
    }

    // Truth row carries the rescaled-clock factor (1 - 1/n).
    Rng rng(Rng::substream_seed(sim.seed, 0));
    const LinearSystem sys = generate_system(sim.n, rng);
    const double duration = 1.0 - 1.0 / sim.n;
    CHECK((r1.truth_row.transpose() - duration * sys.A.row(0))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(r1.truth_support == std::vector<int>{0, 1});

    // The oracle estimator knows the support by construction.
    const EstimatorOutcome& oracle_out =
        r1.estimators[static_cast<size_t>(EstimatorKind::Oracle)];
    REQUIRE(oracle_out.ok);
    CHECK(oracle_out.support_exact);
    CHECK(oracle_out.nonzeros == 2);
    REQUIRE(oracle_out.ppv.has_value());
    CHECK(*oracle_out.ppv == 1.0);
}

TEST_CASE("noiseless benchmark recovers the first row") {
    SimConfig sim;
    sim.n = 200;
    sim.sigma = 0.0;
    sim.replicates = 3;
    sim.seed = 5;
    EstimatorConfig est;
    const BenchmarkReport report = run_benchmark(sim, est);
    REQUIRE(report.completed() == 3);
    const EstimatorAggregate scad = report.aggregate(EstimatorKind::Scad);
    REQUIRE(scad.count == 3);
    CHECK(scad.amse_mean < 1e-2);
    CHECK(scad.avg_nonzero == 2.0);  // every replicate selects exactly 2
}

TEST_CASE("aggregates are invariant to replicate order") {
    SimConfig sim;
    sim.n = 50;
    sim.replicates = 3;
    sim.seed = 11;
    EstimatorConfig est;
    BenchmarkReport report = run_benchmark(sim, est);
    const EstimatorAggregate before = report.aggregate(EstimatorKind::Ols);
    std::reverse(report.replicates.begin(), report.replicates.end());
    const EstimatorAggregate after = report.aggregate(EstimatorKind::Ols);
    CHECK(std::abs(before.amse_mean - after.amse_mean) < 1e-12);
    CHECK(std::abs(before.amse_se - after.amse_se) < 1e-12);
    CHECK(before.support_match_rate == after.support_match_rate);
}

TEST_CASE("per-replicate failures are recorded, not propagated") {
    // A bandwidth too small for the sample starves every window; the
    // replicate must fail gracefully inside the report.
    SimConfig sim;
    sim.n = 50;
    sim.replicates = 2;
    EstimatorConfig est;
    est.bandwidths = {1e-4};
    const BenchmarkReport report = run_benchmark(sim, est);
    CHECK(report.failed() == 2);
    CHECK(report.completed() == 0);
    for (const ReplicateOutcome& r : report.replicates) {
        CHECK(!r.ok);
        CHECK(!r.error.empty());
    }
    const EstimatorAggregate agg = report.aggregate(EstimatorKind::Scad);
    CHECK(agg.amse_mean == 0.0);  // empty aggregate
}
