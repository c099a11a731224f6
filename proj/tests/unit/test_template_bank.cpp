#include <doctest.h>

#include <cmath>
#include <random>

#include "dttm/error.hpp"
#include "dttm/matching.hpp"
#include "dttm/template_bank.hpp"

using namespace dttm;

namespace {

Detection det(Embedding e, double conf) { return Detection{BBox{}, conf, std::move(e), std::nullopt}; }

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n;
    Embedding e(dim);
    double s = 0;
    for (auto& x : e) {
        x = n(rng);
        s += x * x;
    }
    for (auto& x : e) x /= std::sqrt(s);
    return e;
}

} // namespace

TEST_CASE("init_bank") {
    const TemplateBank b = init_bank(det({1, 2, 3}, 1.0), 5);
    REQUIRE(b.size() == 1);
    CHECK(b.capacity() == 5);
    CHECK(b[0] == Template{{1, 2, 3}, 0, 0});
    CHECK(appearance_weight(b, det({1, 2, 3}, 0.9)).similarity == 1.0);
    CHECK_THROWS_AS(init_bank(det({1, 0}, 1.0), 0), ConfigError);
}

TEST_CASE("confident dissimilar match grows the bank") {
    const MatchingThresholds th;
    const TemplateBank b = init_bank(det({1, 0}, 1.0), 5);
    const BankUpdate u = dttm_update(b, det({0, 1}, 0.9), AppearanceMatch{0.3, 0}, th, 4);
    REQUIRE(u.bank.size() == 2);
    CHECK(u.added);
    CHECK(!u.evicted);
    CHECK(u.bank[0].use_count == 1);
    CHECK(u.bank[1] == Template{{0, 1}, 4, 0});
}

TEST_CASE("similar match only bumps the attaining template") {
    const MatchingThresholds th;
    const TemplateBank b(5, {Template{{1, 0}, 0, 2}, Template{{0, 1}, 3, 7}});
    const BankUpdate u = dttm_update(b, det({0.1, 1}, 0.9), AppearanceMatch{0.8, 1}, th, 9);
    CHECK(!u.added);
    REQUIRE(u.bank.size() == 2);
    CHECK(u.bank[0].use_count == 2);
    CHECK(u.bank[1].use_count == 8);
    CHECK(u.bank[1].embedding == Embedding{0, 1});
}

TEST_CASE("low confidence blocks growth") {
    const MatchingThresholds th;
    const TemplateBank b = init_bank(det({1, 0}, 1.0), 5);
    CHECK(dttm_update(b, det({0, 1}, 0.5), AppearanceMatch{0.0, 0}, th, 1).bank.size() == 1);
    CHECK(dttm_update(b, det({0, 1}, 0.51), AppearanceMatch{0.0, 0}, th, 1).bank.size() == 2);
    CHECK(dttm_update(b, det({0, 1}, 0.9), AppearanceMatch{0.5, 0}, th, 1).bank.size() == 1);
}

TEST_CASE("least used template is evicted at capacity") {
    const MatchingThresholds th;
    const TemplateBank b(2, {Template{{1, 0, 0}, 0, 5}, Template{{0, 1, 0}, 3, 0}});
    const BankUpdate u = dttm_update(b, det({0, 0, 1}, 0.9), AppearanceMatch{0.2, 0}, th, 10);
    REQUIRE(u.bank.size() == 2);
    REQUIRE(u.evicted);
    CHECK(*u.evicted == Template{{0, 1, 0}, 3, 0});
    CHECK(u.bank[0] == Template{{1, 0, 0}, 0, 6});
    CHECK(u.bank[1] == Template{{0, 0, 1}, 10, 0});
}

TEST_CASE("the initial template is evictable") {
    const MatchingThresholds th;
    const TemplateBank b(2, {Template{{1, 0, 0}, 0, 0}, Template{{0, 1, 0}, 3, 4}});
    const BankUpdate u = dttm_update(b, det({0, 0, 1}, 0.9), AppearanceMatch{0.2, 1}, th, 10);
    REQUIRE(u.evicted);
    CHECK(u.evicted->born_frame == 0);
    CHECK(u.bank[0].embedding == Embedding{0, 1, 0});
}

TEST_CASE("capacity one never grows") {
    const MatchingThresholds th;
    TemplateBank b = init_bank(det({1, 0}, 1.0), 1);
    for (int f = 1; f < 20; ++f) {
        b = dttm_update(b, det({0, 1}, 0.95), AppearanceMatch{0.0, 0}, th, f).bank;
        CHECK(b.size() == 1);
    }
}

TEST_CASE("disabled growth keeps embeddings fixed") {
    MatchingThresholds th;
    th.sigma_app = -1.0;
    std::mt19937_64 rng(6);
    TemplateBank b = init_bank(det(random_unit(rng, 4), 1.0), 3);
    const Embedding first = b[0].embedding;
    for (int f = 1; f < 50; ++f) {
        const Detection d = det(random_unit(rng, 4), 0.99);
        b = dttm_update(b, d, appearance_weight(b, d), th, f).bank;
    }
    REQUIRE(b.size() == 1);
    CHECK(b[0].embedding == first);
    CHECK(b[0].use_count == 49);
}

TEST_CASE("moving average fixtures") {
    const Template t{{1, 0}, 0, 3};
    CHECK(moving_average_update(t, {0, 1}, 0.0).embedding == Embedding{1, 0});
    CHECK(moving_average_update(t, {0, 1}, 1.0).embedding == Embedding{0, 1});
    const Template m = moving_average_update(t, {0, 1}, 0.3);
    CHECK(m.embedding[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.embedding[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.born_frame == 0);
    CHECK(m.use_count == 3);
}

TEST_CASE("moving average closed form") {
    const Embedding e0{0.6, -0.8, 0.0}, obs{0.0, 0.28, 0.96};
    for (double mnt : {0.05, 0.3, 0.9}) {
        Template t{e0, 0, 0};
        for (int n = 1; n <= 50; ++n) {
            t = moving_average_update(t, obs, mnt);
            const double keep = std::pow(1.0 - mnt, n);
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(t.embedding[i] - (keep * e0[i] + (1 - keep) * obs[i])) <= 1e-9);
        }
    }
}

TEST_CASE("fuzzed sequences keep the capacity bound and evict least used") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> cap(1, 6);
    const MatchingThresholds th;
    for (int seq = 0; seq < 300; ++seq) {
        const std::size_t k = cap(rng);
        TemplateBank b = init_bank(det(random_unit(rng, 3), 1.0), k);
        for (int f = 1; f <= 60; ++f) {
            const Detection d = det(random_unit(rng, 3), u01(rng));
            const BankUpdate u = dttm_update(b, d, appearance_weight(b, d), th, f);
            REQUIRE(u.bank.size() >= 1);
            REQUIRE(u.bank.size() <= k);
            if (u.evicted) {
                for (const Template& t : u.bank.templates()) {
                    CHECK(u.evicted->use_count <= t.use_count);
                    if (u.evicted->use_count == t.use_count) CHECK(u.evicted->born_frame <= t.born_frame);
                }
            }
            b = u.bank;
        }
    }
}

TEST_CASE("replaying an update sequence is deterministic") {
    auto play = [] {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        TemplateBank b = init_bank(det(random_unit(rng, 5), 1.0), 4);
        for (int f = 1; f <= 100; ++f) {
            const Detection d = det(random_unit(rng, 5), u01(rng));
            b = dttm_update(b, d, appearance_weight(b, d), MatchingThresholds{}, f).bank;
        }
        return b;
    };
    CHECK(play() == play());
}

TEST_CASE("threshold validation") {
    MatchingThresholds t;
    CHECK_NOTHROW(validate(t));
    t.sigma_app = -1.0;
    CHECK_NOTHROW(validate(t));
    t.sigma_app = -0.5;
    CHECK_THROWS_AS(validate(t), ConfigError);
    t = {};
    t.min_match_weight = 2.5;
    CHECK_THROWS_AS(validate(t), ConfigError);
    t = {};
    t.momentum = 1.2;
    CHECK_THROWS_AS(validate(t), ConfigError);
}
