#include "marginlab/core/csv_io.hpp"
#include "marginlab/core/dataset.hpp"
#include "marginlab/core/errors.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/core/samplers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace marginlab;

namespace {

// |observed - expected| within four binomial standard deviations.
bool within_4sigma(std::size_t hits, std::size_t trials, double p) {
    const double mean = p * static_cast<double>(trials);
    const double sd = std::sqrt(static_cast<double>(trials) * p * (1.0 - p));
    return std::abs(static_cast<double>(hits) - mean) <= 4.0 * sd;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
    CounterRng a(Seed{9}, 3), b(Seed{9}, 3), c(Seed{9}, 4);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs |= x != c.next_u64();
    }
    CHECK(differs);
    CHECK(derive_seed(Seed{1}, 2).value == derive_seed(Seed{1}, 2).value);
    CHECK(derive_seed(Seed{1}, 2).value != derive_seed(Seed{1}, 3).value);
}

TEST_CASE("rng moments and ranges") {
    CounterRng rng(Seed{5}, 0);
    const std::size_t n = 100'000;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t positive = 0, low_half = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
        if (rng.sign() > 0) ++positive;
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        if (u < 0.5) ++low_half;
        const double v = rng.uniform_open_low();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        REQUIRE(rng.below(7) < 7);
    }
    // Mean of N(0,1) has sd 1/sqrt(n); the sample second moment has sd sqrt(2/n).
    CHECK(std::abs(sum / n) <= 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(sum_sq / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
    CHECK(within_4sigma(positive, n, 0.5));
    CHECK(within_4sigma(low_half, n, 0.5));
}

TEST_CASE("distribution D: structure and case frequencies") {
    const std::size_t n = 20'000, d = 12;
    const Dataset data = sample_distribution_d(n, d, Seed{3});
    REQUIRE(data.n() == n);
    REQUIRE(data.d() == d);
    std::size_t cases[4] = {0, 0, 0, 0};
    std::size_t tail_plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.x(i);
        if (data.label(i) > 0) {
            REQUIRE(std::abs(x[0]) == 1.0);
            REQUIRE(x[1] == 0.0);
            ++cases[x[0] > 0 ? 0 : 1];
        } else {
            REQUIRE(x[0] == 0.0);
            REQUIRE(std::abs(x[1]) == 1.0);
            ++cases[x[1] > 0 ? 2 : 3];
        }
        for (std::size_t k = 2; k < d; ++k) {
            REQUIRE(std::abs(x[k]) == 1.0);
            if (x[k] > 0) ++tail_plus;
        }
    }
    for (auto c : cases) CHECK(within_4sigma(c, n, 0.25));
    CHECK(within_4sigma(tail_plus, n * (d - 2), 0.5));
    CHECK_THROWS_AS(sample_distribution_d(5, 2, Seed{0}), DimensionError);
}

TEST_CASE("samplers are deterministic and prefix-stable") {
    CHECK(sample_distribution_d(50, 6, Seed{8}) == sample_distribution_d(50, 6, Seed{8}));
    CHECK_FALSE(sample_distribution_d(50, 6, Seed{8}) == sample_distribution_d(50, 6, Seed{9}));
    CHECK(sample_distribution_d(80, 6, Seed{8}).head(30) == sample_distribution_d(30, 6, Seed{8}));
}

TEST_CASE("teacher sampling respects the margin floor and labels") {
    const NetParams teacher = make_teacher(5, 4, Seed{2});
    TeacherSampleOptions o;
    o.margin_floor = 0.5;
    const Dataset data = sample_teacher_net(300, teacher, o, Seed{4});
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double f = forward(teacher, data.x(i));
        CHECK(std::abs(f) >= 0.5);
        CHECK(data.label(i) == (f > 0 ? 1.0 : -1.0));
    }
    TeacherSampleOptions reg;
    reg.target = TeacherTarget::regression;
    const Dataset r = sample_teacher_net(20, teacher, reg, Seed{4});
    CHECK(r.kind() == LabelKind::regression);
    for (std::size_t i = 0; i < r.n(); ++i) CHECK(r.label(i) == forward(teacher, r.x(i)));

    TeacherSampleOptions impossible;
    impossible.margin_floor = 1e9;
    CHECK_THROWS_AS(sample_teacher_net(10, teacher, impossible, Seed{1}), InfeasibleMarginError);
}

TEST_CASE("interval data and the bias lift") {
    const Dataset line = sample_interval_1d(4, 0.5);
    CHECK(line.x(0)[0] == -0.75);
    CHECK(line.x(3)[0] == 0.75);
    CHECK(line.label(0) == 1.0);
    CHECK(line.label(1) == -1.0);
    const Dataset lifted = lift_with_bias(line);
    CHECK(lifted.d() == 2);
    CHECK(lifted.x(2)[0] == line.x(2)[0]);
    CHECK(lifted.x(2)[1] == 1.0);
    CHECK(lifted.label(2) == line.label(2));
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset::from_rows(2, {1, 2, 3}, {1, -1}, LabelKind::binary), DimensionError);
    CHECK_THROWS_AS(Dataset::from_rows(1, {1}, {0.5}, LabelKind::binary), std::invalid_argument);
    CHECK_THROWS_AS(Dataset::from_rows(1, {1}, {3}, LabelKind::multiclass, 3), std::invalid_argument);
    const Dataset d = Dataset::from_rows(2, {3, 4, 0, 1}, {1, -1}, LabelKind::binary);
    CHECK(d.max_norm() == 5.0);
    const Dataset e = d.with_appended({{1, 1}, BinaryLabel{1}});
    CHECK(e.n() == 3);
    CHECK_THROWS_AS(d.with_appended({{1}, BinaryLabel{1}}), DimensionError);
}

TEST_CASE("csv dataset parsing") {
    std::istringstream with_header("x1,x2,y\n0.5,1,1\n-1,2e-1,-1\n");
    const Dataset d = parse_csv(with_header, LabelKind::binary);
    CHECK(d.n() == 2);
    CHECK(d.d() == 2);
    CHECK(d.x(1)[1] == 0.2);
    CHECK(d.label(1) == -1.0);

    std::istringstream ragged("1,2,1\n1,1\n");
    try {
        parse_csv(ragged, LabelKind::binary);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream bad_label("1,2,1\n3,4,0\n");
    CHECK_THROWS_AS(parse_csv(bad_label, LabelKind::binary), ParseError);
    std::istringstream bad_cell("1,2,1\n3,abc,1\n");
    CHECK_THROWS_AS(parse_csv(bad_cell, LabelKind::binary), ParseError);
    std::istringstream header_only("a,b\n");
    CHECK_THROWS_AS(parse_csv(header_only, LabelKind::binary), ParseError);

    std::istringstream multi("1,0\n2,3\n");
    const Dataset m = parse_csv(multi, LabelKind::multiclass);
    CHECK(m.num_classes() == 4);
}

}  // TEST_SUITE
