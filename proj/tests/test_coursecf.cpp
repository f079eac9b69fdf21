#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "coldpack/coursecf.hpp"
#include "coldpack/rng.hpp"

using namespace coldpack;

namespace {

Booking quick_booking(const Id& user, const Id& course) {
    Booking b;
    b.user_id = user;
    b.course_id = course;
    b.package_id = "P_" + user + "_" + course;
    b.booked_at = make_date(2012, 7, 1);
    b.play_date = make_date(2012, 7, 8);
    b.price_paid = 9000;
    b.party_size = 2;
    b.num_parties = 1;
    return b;
}

}  // namespace

TEST_CASE("one user booking two courses") {
    std::vector<Booking> bs = {quick_booking("U1", "A"), quick_booking("U1", "B")};
    CooccurrenceMatrix m = build_cooccurrence(bs);
    CHECK(m.at("A", "B") == 1);
    CHECK(m.at("A", "A") == 1);
    CHECK(m.at("B", "B") == 1);
}

TEST_CASE("repeat bookings by the same user count once") {
    std::vector<Booking> bs = {quick_booking("U1", "A"), quick_booking("U1", "A"),
                               quick_booking("U1", "B")};
    CooccurrenceMatrix m = build_cooccurrence(bs);
    CHECK(m.at("A", "B") == 1);
    CHECK(m.at("A", "A") == 1);
}

TEST_CASE("random fixtures match the brute-force double loop") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Booking> bs;
        int n_users = 20;
        std::map<Id, std::set<Id>> course_sets;
        for (int u = 0; u < n_users; ++u) {
            Id user = "U" + std::to_string(u);
            int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
            for (int i = 0; i < n; ++i) {
                Id course = "C" + std::to_string(rng.uniform_int(0, 7));
                bs.push_back(quick_booking(user, course));
                course_sets[user].insert(course);
            }
        }
        CooccurrenceMatrix m = build_cooccurrence(bs);

        // brute force over user course-sets
        for (const auto& ci : m.course_ids)
            for (const auto& cj : m.course_ids) {
                std::uint32_t expected = 0;
                for (const auto& [user, set] : course_sets)
                    expected += set.count(ci) && set.count(cj);
                CHECK(m.at(ci, cj) == expected);
            }
    }
}

TEST_CASE("build is order-independent") {
    Rng rng(5);
    std::vector<Booking> bs;
    for (int u = 0; u < 10; ++u)
        for (int i = 0; i < 3; ++i)
            bs.push_back(quick_booking("U" + std::to_string(u),
                                       "C" + std::to_string(rng.uniform_int(0, 4))));
    CooccurrenceMatrix a = build_cooccurrence(bs);
    std::reverse(bs.begin(), bs.end());
    CooccurrenceMatrix b = build_cooccurrence(bs);
    CHECK(a.course_ids == b.course_ids);
    CHECK(a.counts == b.counts);
}

TEST_CASE("perfect cosine for a fully shared pair") {
    std::vector<Booking> bs = {quick_booking("U1", "A"), quick_booking("U1", "B"),
                               quick_booking("U2", "A")};
    CooccurrenceMatrix m = build_cooccurrence(bs);
    std::vector<Booking> history = {quick_booking("U9", "B")};
    auto scores = course_scores(history, m);
    // M(B,A)=1, M(B,B)=1, M(A,A)=2 -> cosine = 1/sqrt(2)
    CHECK(scores.at("A") == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(scores.at("B") == doctest::Approx(1.0));
}

TEST_CASE("never co-booked course scores zero") {
    std::vector<Booking> bs = {quick_booking("U1", "A"), quick_booking("U2", "B")};
    CooccurrenceMatrix m = build_cooccurrence(bs);
    auto scores = course_scores({quick_booking("U1", "A")}, m);
    CHECK(scores.at("B") == 0.0);
    CHECK(course_scores({}, m).empty());
}

TEST_CASE("five-course fixture equals hand-computed cosine means") {
    // U1: {A,B}, U2: {A,B,C}, U3: {B,C}, U4: {D}, U5: {A,D}
    std::vector<Booking> bs = {
        quick_booking("U1", "A"), quick_booking("U1", "B"), quick_booking("U2", "A"),
        quick_booking("U2", "B"), quick_booking("U2", "C"), quick_booking("U3", "B"),
        quick_booking("U3", "C"), quick_booking("U4", "D"), quick_booking("U5", "A"),
        quick_booking("U5", "D"),
    };
    std::vector<Id> universe = {"A", "B", "C", "D", "E"};
    CooccurrenceMatrix m = build_cooccurrence(bs, universe);
    // diagonals: A=3, B=3, C=2, D=2, E=0
    std::vector<Booking> history = {quick_booking("UX", "A"), quick_booking("UX", "C")};
    auto scores = course_scores(history, m);
    double exp_a = (3.0 / 3.0 + 1.0 / std::sqrt(2.0 * 3.0)) / 2.0;
    double exp_b = (2.0 / 3.0 + 2.0 / std::sqrt(2.0 * 3.0)) / 2.0;
    double exp_d = (1.0 / std::sqrt(2.0 * 3.0) + 0.0) / 2.0;
    CHECK(scores.at("A") == doctest::Approx(exp_a).epsilon(1e-12));
    CHECK(scores.at("B") == doctest::Approx(exp_b).epsilon(1e-12));
    CHECK(scores.at("D") == doctest::Approx(exp_d).epsilon(1e-12));
    CHECK(scores.at("E") == 0.0);  // zero diagonal

    // cosine stays within [0,1]
    for (const auto& [id, s] : scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("filter_courses takes the top m with id tie-breaks") {
    std::map<Id, double> scores = {{"A", 0.9}, {"B", 0.5}, {"C", 0.7}};
    auto top2 = filter_courses(scores, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0] == "A");
    CHECK(top2[1] == "C");

    std::map<Id, double> tied = {{"A", 0.9}, {"B", 0.5}, {"C", 0.5}};
    auto t = filter_courses(tied, 2);
    CHECK(t[1] == "B");  // lower id wins the tie

    auto forced = filter_courses(scores, 2, Id("B"));
    REQUIRE(forced.size() == 3);
    CHECK(std::find(forced.begin(), forced.end(), "B") != forced.end());

    auto not_forced = filter_courses(scores, 2, Id("A"));
    CHECK(not_forced.size() == 2);
    CHECK_THROWS(filter_courses(scores, 0));
}
