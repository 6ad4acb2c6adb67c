// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "csauth/key_schedule.hpp"
#include "csauth/rng.hpp"
#include "csauth/tagcrypt.hpp"

using namespace csauth;

namespace {

Eigen::MatrixXd synthesized_key(std::uint64_t seed, Eigen::Index m = 64, Eigen::Index n = 256,
                                int rounds = 6) {
    Rng rng(seed);
    std::vector<double> gains(18);
    for (auto& g : gains) g = rng.rayleigh(1.0);
    return key::synthesize_matrix(gains, m, n, rounds);
}

std::vector<std::uint8_t> all_present(Eigen::Index m) {
    return std::vector<std::uint8_t>(static_cast<std::size_t>(m), 1);
}

}  // namespace

TEST_CASE("tag index flags rows holding a maximal entry", "[tagcrypt]") {
    Eigen::MatrixXd phi(3, 4);
    phi << 0.1, 0.2, 1.0, 0.3,
           0.4, 0.5, 0.6, 0.7,
           0.0, 0.8, 0.9, 0.2;
    const auto k = tag::tag_index(phi);
    CHECK(k.bits == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(k.count() == 1);

    Eigen::MatrixXd everywhere(2, 3);
    everywhere << 1.0, 0.0, 0.5,
                  0.2, 1.0, 0.3;
    CHECK(tag::tag_index(everywhere).bits == std::vector<std::uint8_t>{1, 1});

    Eigen::MatrixXd unnormalized(2, 3);
    unnormalized << 0.1, 0.2, 0.3, 0.4, 0.5, 0.99;
    CHECK_THROWS_AS(tag::tag_index(unnormalized), std::invalid_argument);
}

TEST_CASE("tag values come off the diagonal", "[tagcrypt]") {
    Eigen::MatrixXd phi(3, 4);
    phi << 0.37, 0.2, 1.0, 0.3,
           0.4, 0.5, 0.6, 0.7,
           0.0, 0.8, 0.9, 0.2;
    const auto t = tag::tag_sequence(phi, tag::tag_index(phi));
    REQUIRE(t.rows == std::vector<Eigen::Index>{0});
    CHECK(t.values[0] == 0.37);

    // values stay within the normalized entry range
    const auto key_phi = synthesized_key(1);
    const auto kt = tag::tag_sequence(key_phi, tag::tag_index(key_phi));
    for (double v : kt.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("tag budget is a small fraction of the rows", "[tagcrypt]") {
    // at full scale the accumulator maximum has low multiplicity, so only a
    // handful of the 256 rows ever carry tags
    double total = 0.0;
    Eigen::Index largest = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto phi = synthesized_key(100 + s, 256, 1024, 6);
        const auto count = tag::tag_index(phi).count();
        total += static_cast<double>(count);
        largest = std::max(largest, count);
        REQUIRE(count >= 1);
    }
    CHECK(total / 30.0 < 8.0);
    CHECK(largest < 16);
}

TEST_CASE("embedding lifts tags by the data mean", "[tagcrypt]") {
    Eigen::VectorXd y(3);
    y << 2, 4, 6;
    tag::TagIndex k{{0, 1, 0}};
    tag::TagValues t;
    t.rows = {1};
    t.values = {0.5};
    const Eigen::VectorXd s = tag::embed(y, k, t);
    CHECK(s(0) == 2.0);
    CHECK(s(1) == 4.5);  // 0.5 + mean{2, 6}
    CHECK(s(2) == 6.0);

    // no tags: the message is the measurement vector itself
    tag::TagIndex none{{0, 0, 0}};
    CHECK(tag::embed(y, none, tag::TagValues{}).cwiseEqual(y).all());

    tag::TagIndex all{{1, 1, 1}};
    tag::TagValues t3;
    t3.rows = {0, 1, 2};
    t3.values = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(tag::embed(y, all, t3), std::invalid_argument);
}

TEST_CASE("split partitions present positions by the index", "[tagcrypt]") {
    Eigen::VectorXd v(3);
    v << 10, 20, 30;
    tag::TagIndex k{{0, 1, 0}};

    const auto full = tag::split({v, {1, 1, 1}}, k);
    CHECK(full.data_rows == std::vector<Eigen::Index>{0, 2});
    CHECK(full.tag_rows == std::vector<Eigen::Index>{1});
    CHECK(full.data_values(0) == 10.0);
    CHECK(full.data_values(1) == 30.0);
    CHECK(full.tag_values(0) == 20.0);

    const auto masked = tag::split({v, {1, 1, 0}}, k);
    CHECK(masked.data_rows == std::vector<Eigen::Index>{0});

    const auto none = tag::split({v, {0, 0, 0}}, k);
    CHECK(none.data_rows.empty());
    CHECK(none.tag_rows.empty());
}

TEST_CASE("extraction undoes the embedding on a lossless message", "[tagcrypt]") {
    Rng rng(21);
    for (int rep = 0; rep < 100; ++rep) {
        const auto phi = synthesized_key(300 + static_cast<std::uint64_t>(rep));
        const auto k = tag::tag_index(phi);
        const auto t = tag::tag_sequence(phi, k);
        Eigen::VectorXd y(phi.rows());
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = 3.0 * rng.normal();
        const Eigen::VectorXd s = tag::embed(y, k, t);

        const auto extracted = tag::extract_tag({s, all_present(phi.rows())}, k);
        REQUIRE(extracted.rows == t.rows);
        for (std::size_t q = 0; q < t.values.size(); ++q) {
            REQUIRE(extracted.present[q] == 1);
            CHECK(std::abs(extracted.values[q] - t.values[q]) <= 1e-12);
        }
    }
}

TEST_CASE("extraction shifts by the lost-data mean difference", "[tagcrypt]") {
    Eigen::VectorXd y(3);
    y << 2, 4, 6;
    tag::TagIndex k{{0, 1, 0}};
    tag::TagValues t;
    t.rows = {1};
    t.values = {0.5};
    const Eigen::VectorXd s = tag::embed(y, k, t);  // tag position carries 4.5

    // losing the 6 drops the data mean from 4 to 2, so the estimate gains 2
    const auto extracted = tag::extract_tag({s, {1, 1, 0}}, k);
    CHECK(extracted.values[0] == Catch::Approx(2.5).margin(1e-12));

    // all tag positions lost: empty extraction, still one budgeted row
    const auto lost = tag::extract_tag({s, {1, 0, 1}}, k);
    CHECK(lost.present_count() == 0);
    REQUIRE(lost.present.size() == 1);

    CHECK_THROWS_AS(tag::extract_tag({s, {0, 1, 0}}, k), std::invalid_argument);
}

TEST_CASE("data passes through the message bit-exact", "[tagcrypt]") {
    Rng rng(22);
    const auto phi = synthesized_key(23);
    const auto k = tag::tag_index(phi);
    const auto t = tag::tag_sequence(phi, k);
    Eigen::VectorXd y(phi.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
    const Eigen::VectorXd s = tag::embed(y, k, t);
    const auto parts = tag::split({s, all_present(phi.rows())}, k);
    for (std::size_t q = 0; q < parts.data_rows.size(); ++q)
        CHECK(parts.data_values(static_cast<Eigen::Index>(q)) == y(parts.data_rows[q]));
}

TEST_CASE("verdict counts present in-tolerance tags", "[tagcrypt]") {
    tag::TagValues expected;
    expected.rows = {0, 1, 2, 3};
    expected.values = {0.1, 0.2, 0.3, 0.4};

    tag::ExtractedTags exact;
    exact.rows = expected.rows;
    exact.values = expected.values;
    exact.present = {1, 1, 1, 1};
    CHECK(tag::authenticate(exact, expected, 0.05, 0.9).accepted);

    // half mismatched against threshold 0.6 rejects
    tag::ExtractedTags half = exact;
    half.values = {0.1, 0.2, 0.9, 0.9};
    const auto d = tag::authenticate(half, expected, 0.05, 0.6);
    CHECK(d.matched == 2);
    CHECK_FALSE(d.accepted);

    // absent tags count against the full budget
    tag::ExtractedTags missing = exact;
    missing.present = {1, 0, 0, 0};
    CHECK_FALSE(tag::authenticate(missing, expected, 0.05, 0.6).accepted);

    CHECK_THROWS_AS(tag::authenticate(exact, expected, 0.0, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(tag::authenticate(exact, expected, 0.05, 1.0), std::invalid_argument);
}

TEST_CASE("verdict boundary is strict", "[tagcrypt]") {
    // matched / tag_count == tau2 exactly must reject
    tag::TagValues expected;
    tag::ExtractedTags got;
    for (int i = 0; i < 10; ++i) {
        expected.rows.push_back(i);
        expected.values.push_back(0.5);
        got.rows.push_back(i);
        got.values.push_back(i < 6 ? 0.5 : 0.9);
        got.present.push_back(1);
    }
    const auto d = tag::authenticate(got, expected, 0.05, 0.6);
    CHECK(d.matched == 6);
    CHECK_FALSE(d.accepted);

    got.values[6] = 0.5;
    CHECK(tag::authenticate(got, expected, 0.05, 0.6).accepted);
}

TEST_CASE("match count never grows as tags are erased", "[tagcrypt]") {
    Rng rng(24);
    const auto phi = synthesized_key(25, 64, 256, 1);  // coarse sums give more tags
    const auto k = tag::tag_index(phi);
    const auto t = tag::tag_sequence(phi, k);
    Eigen::VectorXd y(phi.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
    const Eigen::VectorXd s = tag::embed(y, k, t);

    auto present = all_present(phi.rows());
    Eigen::Index last = std::numeric_limits<Eigen::Index>::max();
    for (Eigen::Index row : t.rows) {
        const auto d = tag::authenticate(tag::extract_tag({s, present}, k), t, 0.05, 0.6);
        CHECK(d.matched <= last);
        last = d.matched;
        present[static_cast<std::size_t>(row)] = 0;  // erase one more tag position
    }
}

TEST_CASE("independent keys rarely share tag structure", "[tagcrypt]") {
    // The tag budget is usually a single row, and that row lands nearly
    // uniformly among the matrix rows, so identical index vectors occur at
    // roughly the reciprocal of the row count. The useful security regression
    // is on rates: bare index collisions stay at the reciprocal-row level and
    // full-secret collisions (index plus every value within tau1) stay an
    // order below.
    const double tau1 = 0.05;
    int index_collisions = 0;
    int secret_collisions = 0;
    for (int pair = 0; pair < 1000; ++pair) {
        const auto a = synthesized_key(5000 + 2 * static_cast<std::uint64_t>(pair), 64, 256);
        const auto b = synthesized_key(5001 + 2 * static_cast<std::uint64_t>(pair), 64, 256);
        const auto ka = tag::tag_index(a);
        const auto kb = tag::tag_index(b);
        if (ka.bits != kb.bits) continue;
        ++index_collisions;
        const auto ta = tag::tag_sequence(a, ka);
        const auto tb = tag::tag_sequence(b, kb);
        bool values_close = true;
        for (std::size_t q = 0; q < ta.values.size(); ++q)
            values_close = values_close && std::abs(ta.values[q] - tb.values[q]) < tau1;
        secret_collisions += values_close ? 1 : 0;
    }
    CHECK(index_collisions <= 30);   // ~1/64 expected at this row count
    CHECK(secret_collisions <= 5);
}

TEST_CASE("encode and decode round-trip without a channel", "[tagcrypt]") {
    Rng rng(26);
    const auto phi = synthesized_key(27, 64, 256);
    const Eigen::VectorXd x = cs::generate_sparse_signal(256, 0.02, rng);
    const Eigen::VectorXd s = tag::encode_message(phi, x);

    const auto result =
        tag::decode_message(phi, {s, all_present(phi.rows())}, 0.05, 0.6, 10, 1e-10);
    CHECK(result.auth.accepted);
    CHECK(cs::rmse(result.report.recovered, x) < 1e-6);
}
