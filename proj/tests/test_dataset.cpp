#include "doctest.h"

#include "coreset/dataset.hpp"
#include "coreset/error.hpp"

#include <sstream>

using namespace coreset;

TEST_SUITE("dataset") {

TEST_CASE("uniform ball respects its radius exactly") {
    for (std::size_t d : {1u, 2u, 7u, 50u}) {
        const Dataset data = generate(SyntheticSource::uniform_ball(d, 1.0), 10000, 17);
        for (std::size_t i = 0; i < data.size(); ++i) REQUIRE(data.points().row(i).norm() <= 1.0);
    }
    const Dataset r3 = generate(SyntheticSource::uniform_ball(3, 3.0), 5000, 4);
    CHECK(r3.points().rowwise().norm().maxCoeff() <= 3.0);
    CHECK(r3.points().rowwise().norm().maxCoeff() > 2.9);
}

TEST_CASE("scaled gaussian stays in the unit ball") {
    const Dataset data = generate(SyntheticSource::gaussian_scaled_to_ball(10), 20000, 5);
    CHECK(data.points().rowwise().norm().maxCoeff() <= 1.0);
    const double m2 = data.points().rowwise().squaredNorm().mean();
    CHECK(m2 <= 1.0);
    CHECK(m2 > 0.8);
}

TEST_CASE("isotropic gaussian second moment") {
    // mean |x|^2 over 1e5 draws of chi-square(10): sd = sqrt(20/1e5) ~ 0.014
    const Dataset data = generate(SyntheticSource::gaussian_iso(10, 1.0), 100000, 123);
    CHECK(std::abs(data.points().rowwise().squaredNorm().mean() - 10.0) < 0.3);
    CHECK(SyntheticSource::gaussian_iso(10, 1.0).analytic_e1() == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("generation is deterministic and uniform-weighted") {
    const auto s = SyntheticSource::gaussian_iso(3, 2.0);
    const Dataset a = generate(s, 100, 9), b = generate(s, 100, 9), c = generate(s, 100, 10);
    CHECK(a.points() == b.points());
    CHECK(a.points() != c.points());
    CHECK((a.weights().array() == 1.0).all());
    CHECK(a.probabilities().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("source descriptors") {
    const auto g = SyntheticSource::parse("gaussian:d=10,scale=1");
    CHECK(g.kind == SyntheticSource::Kind::gaussian_iso);
    CHECK(g.dim == 10);
    const auto b = SyntheticSource::parse("ball:d=4,r=2.5");
    CHECK(b.kind == SyntheticSource::Kind::uniform_ball);
    CHECK(b.param == 2.5);
    CHECK(b.hard_bound().value() == 2.5);
    const auto gb = SyntheticSource::parse("gaussian-ball:d=3");
    CHECK(gb.hard_bound().value() == 1.0);
    CHECK(SyntheticSource::parse(b.describe()).describe() == b.describe());
    CHECK_THROWS_AS(SyntheticSource::parse("ball:r=1"), Error);
    CHECK_THROWS_AS(SyntheticSource::parse("cube:d=3"), Error);
    CHECK_THROWS_AS(SyntheticSource::parse("gaussian:d=2.5"), Error);
    CHECK_THROWS_AS(SyntheticSource::parse("gaussian:d=2,r=1"), Error);
}

TEST_CASE("csv ingestion") {
    std::istringstream plain("1,2\n3,4\n\n5,6\n");
    const Dataset a = read_dataset_csv(plain);
    CHECK(a.size() == 3);
    CHECK(a.dim() == 2);
    CHECK(a.points()(2, 1) == 6.0);

    std::istringstream weighted("x,y,weight\n1,2,0.5\n3,4,1.5\n");
    const Dataset b = read_dataset_csv(weighted, {true, true});
    CHECK(b.dim() == 2);
    CHECK(b.weights()[1] == 1.5);
    CHECK(b.probabilities()[0] == 0.25);
}

TEST_CASE("csv errors carry the row") {
    std::istringstream nan_in("1,2\nnan,4\n");
    try {
        read_dataset_csv(nan_in);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
        CHECK(e.index().value() == 2);
    }
    std::istringstream ragged("1,2\n3\n");
    try {
        read_dataset_csv(ragged);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
        CHECK(e.index().value() == 2);
    }
    std::istringstream junk("1,abc\n");
    CHECK_THROWS_AS(read_dataset_csv(junk), Error);
    std::istringstream neg("1,2,-1\n");
    CHECK_THROWS_AS(read_dataset_csv(neg, {false, true}), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_dataset_csv(empty), Error);
}

TEST_CASE("csv round trip is exact") {
    const Dataset a = generate(SyntheticSource::gaussian_iso(3, 1.0), 50, 1);
    std::stringstream s;
    write_dataset_csv(s, a);
    const Dataset b = read_dataset_csv(s, {false, true});
    CHECK(a.points() == b.points());
    CHECK(a.weights() == b.weights());
}

}
