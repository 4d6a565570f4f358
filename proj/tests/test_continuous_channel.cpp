#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "molcomm/continuous_channel.hpp"
#include "molcomm/errors.hpp"
#include "molcomm/permanent.hpp"
#include "oracles.hpp"

using namespace molcomm;

namespace {

const ChannelParams unit{};

double rel_err(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// sum over all permutations of the labeled density, by explicit enumeration
double density_by_enumeration(const std::vector<double>& y, const std::vector<double>& x) {
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double total = 0.0;
    do {
        double prod = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) prod *= oracle::density(y[perm[i]] - x[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace

TEST_SUITE("labeling") {
    TEST_CASE("apply_labeling blocks") {
        CHECK(apply_labeling(4, {1}) == std::vector<int>{0, 1, 2, 3});
        CHECK(apply_labeling(4, {2}) == std::vector<int>{0, 0, 1, 1});
        CHECK(apply_labeling(5, {2}) == std::vector<int>{0, 0, 1, 1, 2});
        CHECK(apply_labeling(3, {7}) == std::vector<int>{0, 0, 0});
        CHECK(apply_labeling(0, {3}).empty());
        CHECK_THROWS_AS(apply_labeling(3, {0}), std::invalid_argument);
    }
}

TEST_SUITE("simulate") {
    TEST_CASE("empty schedule") {
        Rng rng(1);
        const auto obs = simulate(ReleaseSchedule{}, unit, {}, rng);
        CHECK(obs.y.empty());
        CHECK(obs.b.empty());
        CHECK(obs.lost.empty());
    }

    TEST_CASE("forced transmission times") {
        const std::vector<double> t1{2.5};
        auto obs = observe(ReleaseSchedule{{0.0}}, t1, unit, {});
        CHECK(obs.y == std::vector<double>{2.5});

        const std::vector<double> t2{5.0, 0.5};
        obs = observe(ReleaseSchedule{{0.0, 1.0}}, t2, unit, {1});
        CHECK(obs.y == std::vector<double>{1.5, 5.0});
        CHECK(obs.b == std::vector<int>{1, 0});
        CHECK(invert_sort(obs.y, obs.b) == std::vector<double>{5.0, 1.5});
    }

    TEST_CASE("ties keep release order") {
        const std::vector<double> t{2.0, 1.0, 3.0};
        const auto obs = observe(ReleaseSchedule{{1.0, 2.0, 0.0}}, t, unit, {});
        CHECK(obs.y == std::vector<double>{3.0, 3.0, 3.0});
        CHECK(obs.b == std::vector<int>{0, 1, 2});
    }

    TEST_CASE("deadline drops slow particles") {
        ChannelParams p;
        p.deadline = 2.0;
        const std::vector<double> t{0.5, 3.0, 1.0, 2.0};
        const auto obs = observe(ReleaseSchedule{{0.0, 0.0, 1.0, 5.0}}, t, p, {});
        CHECK(obs.lost == std::vector<std::size_t>{1});
        CHECK(obs.y == std::vector<double>{0.5, 2.0, 7.0});
        CHECK(obs.y.size() + obs.lost.size() == 4);
    }

    TEST_CASE("outputs are sorted and account for every release") {
        Rng rng(5);
        ChannelParams p;
        p.deadline = 10.0;
        std::uniform_real_distribution<double> u(0.0, 20.0);
        for (int trial = 0; trial < 200; ++trial) {
            ReleaseSchedule x;
            for (int i = 0; i < 1 + trial % 17; ++i) x.x.push_back(u(rng));
            HiddenTransmission hidden;
            const auto obs = simulate(x, p, {3}, rng, &hidden);
            CHECK(std::is_sorted(obs.y.begin(), obs.y.end()));
            CHECK(obs.y.size() + obs.lost.size() == x.size());
            CHECK(obs.b.size() == obs.y.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                CHECK(hidden.u[i] == doctest::Approx(x.x[i] + hidden.t[i]));
        }
    }

    TEST_CASE("same stream, same observation") {
        Rng a(42), b(42);
        const ReleaseSchedule x{{0.0, 0.3, 2.0}};
        const auto oa = simulate(x, unit, {}, a);
        const auto ob = simulate(x, unit, {}, b);
        CHECK(oa.y == ob.y);
        CHECK(oa.b == ob.b);
    }
}

TEST_SUITE("invert_sort") {
    TEST_CASE("examples") {
        const std::vector<double> y{1.5, 5.0};
        const std::vector<int> b{2, 1};
        CHECK(invert_sort(y, b) == std::vector<double>{5.0, 1.5});
        const std::vector<double> y1{3.0};
        const std::vector<int> b1{1};
        CHECK(invert_sort(y1, b1) == std::vector<double>{3.0});
        const std::vector<double> y3{1.0, 2.0, 4.0};
        const std::vector<int> id{0, 1, 2};
        CHECK(invert_sort(y3, id) == y3);
    }

    TEST_CASE("errors") {
        const std::vector<double> y{1.0, 2.0};
        const std::vector<int> dup{3, 3};
        const std::vector<int> short_b{0};
        CHECK_THROWS_AS(invert_sort(y, dup), ContractViolation);
        CHECK_THROWS_AS(invert_sort(y, short_b), ContractViolation);
    }
}

TEST_SUITE("labeled density") {
    TEST_CASE("examples") {
        const std::vector<double> y1{2.0};
        const std::vector<int> b1{0};
        CHECK(labeled_density(y1, b1, ReleaseSchedule{{0.0}}, unit) ==
              doctest::Approx(0.109847822366931).epsilon(1e-12));

        const std::vector<double> unsorted{2.0, 1.0};
        const std::vector<int> b2{0, 1};
        CHECK(labeled_density(unsorted, b2, ReleaseSchedule{{0.0, 0.0}}, unit) == 0.0);

        const std::vector<double> y2{1.0, 2.0};
        CHECK(labeled_density(y2, b2, ReleaseSchedule{{0.0, 0.0}}, unit) ==
              doctest::Approx(0.0265799571649764).epsilon(1e-12));
    }

    TEST_CASE("size mismatch") {
        const std::vector<double> y{1.0, 2.0};
        const std::vector<int> b{0, 1};
        CHECK_THROWS_AS(labeled_density(y, b, ReleaseSchedule{{0.0}}, unit), ContractViolation);
    }

    TEST_CASE("likelihood with losses") {
        ChannelParams p;
        p.deadline = 2.0;
        const ReleaseSchedule x{{0.0, 0.5, 1.0}};
        const std::vector<double> t{3.0, 0.7, 1.5};
        const auto obs = observe(x, t, p, {});
        const double expected = std::log(1.0 - cdf(2.0, unit)) + std::log(oracle::density(0.7)) +
                                std::log(oracle::density(1.5));
        CHECK(labeled_log_likelihood(obs, x, p) == doctest::Approx(expected).epsilon(1e-12));

        // an arrival whose implied transmission time exceeds the deadline is impossible
        ObservedArrivals bad{{4.0}, {0}, {1, 2}};
        CHECK(std::isinf(labeled_log_likelihood(bad, x, p)));

        ObservedArrivals dup{{1.0, 2.0}, {0, 0}, {2}};
        CHECK_THROWS_AS(labeled_log_likelihood(dup, x, p), ContractViolation);
    }
}

TEST_SUITE("permanent") {
    TEST_CASE("small cases") {
        SquareMatrix id(4);
        for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1.0;
        CHECK(permanent(id) == doctest::Approx(1.0));
        CHECK(permanent(SquareMatrix(2, {1, 2, 3, 4})) == doctest::Approx(10.0));
        CHECK(permanent(SquareMatrix(3, 1.0)) == doctest::Approx(6.0));
        CHECK(permanent(SquareMatrix(0)) == 1.0);
        CHECK(permanent(SquareMatrix(1, {2.5})) == doctest::Approx(2.5));
    }

    TEST_CASE("order above the cap") {
        CHECK_THROWS_AS(permanent(SquareMatrix(15, 1.0)), SizeError);
        CHECK_THROWS_AS(permanent(SquareMatrix(5, 1.0), 4), SizeError);
        // n! for the all-ones matrix at the cap
        CHECK(permanent(SquareMatrix(14, 1.0)) == doctest::Approx(87178291200.0).epsilon(1e-12));
    }

    TEST_CASE("subset DP agrees with Ryser and keeps tiny permanents") {
        Rng rng(43);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t n = 1; n <= 12; ++n) {
            SquareMatrix m(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
            CHECK(rel_err(permanent_nonnegative(m), permanent(m)) < 1e-10);
        }
        // upper triangular with a tiny diagonal entry: per = 1e-200, row sums ~ 1
        SquareMatrix tri(3);
        tri(0, 0) = 1e-200;
        tri(0, 1) = tri(0, 2) = tri(1, 1) = tri(1, 2) = tri(2, 2) = 1.0;
        CHECK(permanent_nonnegative(tri) == doctest::Approx(1e-200).epsilon(1e-14));
        CHECK_THROWS_AS(permanent_nonnegative(SquareMatrix(15, 1.0)), SizeError);
        CHECK_THROWS_AS(permanent_nonnegative(SquareMatrix(2, {1, -1, 1, 1})), ContractViolation);
    }

    TEST_CASE("Ryser equals n! enumeration on random matrices") {
        Rng rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t n = 1; n <= 8; ++n) {
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> a(n * n);
                for (double& v : a) v = u(rng);
                CHECK(rel_err(permanent(SquareMatrix(n, a)), oracle::permanent(a, n)) < 1e-10);
            }
        }
    }
}

TEST_SUITE("indistinguishable density") {
    TEST_CASE("pair density examples") {
        const std::array<double, 2> y{1.0, 2.0};
        const std::array<double, 2> x0{0.0, 0.0};
        CHECK(pair_density(y, x0, unit) == doctest::Approx(0.0531599143299527).epsilon(1e-12));
        const std::array<double, 2> rev{2.0, 1.0};
        CHECK(pair_density(rev, x0, unit) == 0.0);
        // second term vanishes because y1 - x2 < 0
        const std::array<double, 2> x19{0.0, 1.9};
        CHECK(pair_density(y, x19, unit) == doctest::Approx(0.0205683986549018).epsilon(1e-12));
    }

    TEST_CASE("n = 1 equals the labeled density") {
        const std::vector<double> y{2.0};
        const std::vector<int> b{0};
        const ReleaseSchedule x{{0.4}};
        CHECK(indistinguishable_density(y, x, unit) ==
              doctest::Approx(labeled_density(y, b, x, unit)).epsilon(1e-14));
    }

    TEST_CASE("n = 2 equals the pair density") {
        Rng rng(17);
        std::uniform_real_distribution<double> u(0.0, 5.0);
        for (int i = 0; i < 1000; ++i) {
            const ReleaseSchedule x{{u(rng), u(rng)}};
            const auto obs = simulate(x, unit, {2}, rng);
            const std::array<double, 2> y{obs.y[0], obs.y[1]};
            const std::array<double, 2> xs{x.x[0], x.x[1]};
            CHECK(rel_err(indistinguishable_density(obs.y, x, unit), pair_density(y, xs, unit)) < 1e-10);
        }
    }

    TEST_CASE("n = 3 equals the sum over six permutations") {
        Rng rng(23);
        const ReleaseSchedule x{{0.0, 0.5, 1.0}};
        for (int i = 0; i < 200; ++i) {
            const auto obs = simulate(x, unit, {3}, rng);
            CHECK(rel_err(indistinguishable_density(obs.y, x, unit),
                          density_by_enumeration(obs.y, x.x)) < 1e-10);
        }
    }

    TEST_CASE("larger n against enumeration") {
        Rng rng(29);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (std::size_t n = 4; n <= 7; ++n) {
            ReleaseSchedule x;
            for (std::size_t i = 0; i < n; ++i) x.x.push_back(u(rng));
            const auto obs = simulate(x, unit, {n}, rng);
            CHECK(rel_err(indistinguishable_density(obs.y, x, unit),
                          density_by_enumeration(obs.y, x.x)) < 1e-10);
        }
    }

    TEST_CASE("unsorted y and size errors") {
        const std::vector<double> y{2.0, 1.0};
        CHECK(indistinguishable_density(y, ReleaseSchedule{{0.0, 0.0}}, unit) == 0.0);
        const std::vector<double> y15(15, 1.0);
        CHECK_THROWS_AS(indistinguishable_density(y15, ReleaseSchedule{std::vector<double>(15, 0.0)}, unit),
                        SizeError);
        const std::vector<double> y1{1.0};
        CHECK_THROWS_AS(indistinguishable_density(y1, ReleaseSchedule{{0.0, 0.0}}, unit), ContractViolation);
    }

    TEST_CASE("exchange symmetry in x") {
        Rng rng(31);
        std::uniform_real_distribution<double> u(0.0, 4.0);
        for (int trial = 0; trial < 50; ++trial) {
            ReleaseSchedule x;
            for (int i = 0; i < 5; ++i) x.x.push_back(u(rng));
            const auto obs = simulate(x, unit, {5}, rng);
            const double base = indistinguishable_log_density(obs.y, x, unit);
            ReleaseSchedule shuffled = x;
            std::shuffle(shuffled.x.begin(), shuffled.x.end(), rng);
            CHECK(indistinguishable_log_density(obs.y, shuffled, unit) == doctest::Approx(base).epsilon(1e-12));
        }
    }

    TEST_CASE("far-apart releases reduce to the labeled density") {
        Rng rng(37);
        const ReleaseSchedule x{{0.0, 1e6}};
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> t{sample(unit, rng), sample(unit, rng)};
            if (t[0] > 1e5 || t[1] > 1e5) continue;  // keep the arrivals in release order
            const auto obs = observe(x, t, unit, {});
            CHECK(rel_err(indistinguishable_density(obs.y, x, unit), labeled_density(obs.y, obs.b, x, unit)) <
                  1e-6);
        }
    }

    TEST_CASE("log density survives underflow of the raw entries") {
        // the density itself is far below the smallest double
        const std::vector<double> y{6e-4, 1.5e-3};
        const ReleaseSchedule x{{1e-4, 1e-3}};
        const double lp = indistinguishable_log_density(y, x, unit);
        CHECK(std::isfinite(lp));
        CHECK(indistinguishable_density(y, x, unit) == 0.0);
        const double direct = log_pdf(5e-4, unit) + log_pdf(5e-4, unit);
        CHECK(lp == doctest::Approx(direct).epsilon(1e-12));
    }

    TEST_CASE("pair density integrates to one over the sorted region") {
        // Each coordinate is drawn from the channel after a release picked at
        // random from x, so q(u) = h(u1) h(u2) with h = (f(. - x1) + f(. - x2)) / 2.
        // Every sorted point has two preimages: integral = E_q[pair_density(sort u) / (2 q(u))].
        // The weights are bounded by 4, unlike sampling from the labeled channel.
        Rng rng(41);
        for (const std::array<double, 2> xs : {std::array<double, 2>{0.0, 0.0}, std::array<double, 2>{0.0, 0.3},
                                               std::array<double, 2>{0.0, 2.0}, std::array<double, 2>{1.0, 7.5}}) {
            auto h = [&](double u) { return 0.5 * (oracle::density(u - xs[0]) + oracle::density(u - xs[1])); };
            std::bernoulli_distribution coin(0.5);
            const int n = 200000;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u1 = xs[coin(rng) ? 1 : 0] + sample(unit, rng);
                const double u2 = xs[coin(rng) ? 1 : 0] + sample(unit, rng);
                const std::array<double, 2> y{std::min(u1, u2), std::max(u1, u2)};
                acc += pair_density(y, xs, unit) / (2.0 * h(u1) * h(u2));
            }
            CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
        }
    }
}
