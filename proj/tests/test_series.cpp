#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "irrspec/series.hpp"

using namespace irrspec;

namespace {

PriceSeries parse(const std::string& text) {
    std::istringstream in(text);
    return ingest_csv(in, "t");
}

PriceSeries with_timestamps(std::vector<Timestamp> ts) {
    std::vector<double> p(ts.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 100.0 + static_cast<double>(i);
    return PriceSeries("s", std::move(ts), std::move(p));
}

}  // namespace

TEST(IngestCsv, MinimalInput) {
    auto s = parse("1,100.0\n2,101.5\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.timestamp(1), 2);
    EXPECT_EQ(s.price(1), 101.5);
}

TEST(IngestCsv, HeaderIsSkipped) {
    auto s = parse("t,p\n1,100\n2,101\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.price(0), 100.0);
}

TEST(IngestCsv, CrlfAndBlankLines) {
    auto s = parse("timestamp,price\r\n1,100\r\n\r\n2,101\r\n3,102\r\n");
    EXPECT_EQ(s.size(), 3u);
}

TEST(IngestCsv, NonIncreasingTimestampReportsLine) {
    try {
        parse("1,100\n1,101\n");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        ASSERT_TRUE(e.line().has_value());
        EXPECT_EQ(*e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("non-increasing"), std::string::npos);
    }
}

TEST(IngestCsv, Errors) {
    EXPECT_THROW(parse("1,100\n2,abc\n"), DataError);       // non-numeric after the first row
    EXPECT_THROW(parse("1,100\n2,-1\n"), DataError);
    EXPECT_THROW(parse("1,100\n2,0\n"), DataError);
    EXPECT_THROW(parse("1,100\n2,inf\n"), DataError);
    EXPECT_THROW(parse("1,100\n2\n"), DataError);
    EXPECT_THROW(parse("1,100\nx,101\n"), DataError);
    EXPECT_THROW(parse("1,100\n"), DataError);
    EXPECT_THROW(parse("t,p\n"), DataError);
    EXPECT_THROW(parse("1,100\n3,101,7\n"), DataError);
}

TEST(IngestCsv, MalformedRowCitesLine) {
    try {
        parse("t,p\n1,100\n2,101\n3,oops\n");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), std::optional<std::size_t>(4));
    }
}

TEST(PriceSeries, ConstructorEnforcesInvariants) {
    EXPECT_THROW(make_series("x", {1.0}), DataError);
    EXPECT_THROW(PriceSeries("x", {2, 1}, {1.0, 1.0}), DataError);
    EXPECT_THROW(make_series("x", {1.0, std::nan("")}), DataError);
    EXPECT_NO_THROW(make_series("x", {1.0, 1.0}));
}

TEST(WriteCsv, RoundTripsRandomSeries) {
    std::mt19937_64 rng(11);
    std::lognormal_distribution<double> price(4.0, 1.5);
    std::uniform_int_distribution<int> gap(1, 1000);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng() % 200;
        std::vector<Timestamp> ts(n);
        std::vector<double> p(n);
        Timestamp t = -static_cast<Timestamp>(rng() % 100000);
        for (std::size_t i = 0; i < n; ++i) {
            t += gap(rng);
            ts[i] = t;
            p[i] = price(rng);
        }
        PriceSeries s("s", ts, p);
        for (bool header : {false, true}) {
            std::ostringstream out;
            write_series_csv(out, s, header);
            std::istringstream in(out.str());
            EXPECT_EQ(ingest_csv(in, "s"), s);
        }
    }
}

TEST(WriteCsv, Format) {
    std::ostringstream out;
    write_series_csv(out, PriceSeries("s", {5, 9}, {100.0, 0.1}), true);
    EXPECT_EQ(out.str(), "timestamp,price\n5,100\n9,0.1\n");
}

TEST(AlignSeries, Intersection) {
    auto r = align_series(with_timestamps({1, 2, 3}), with_timestamps({2, 3, 4}));
    EXPECT_EQ(r.a.size(), 2u);
    EXPECT_EQ(r.dropped_a, 1u);
    EXPECT_EQ(r.dropped_b, 1u);
    EXPECT_EQ(r.a.timestamp(0), 2);
    EXPECT_EQ(r.a.price(0), 101.0);  // price carried with its timestamp
    EXPECT_EQ(r.b.price(0), 100.0);
}

TEST(AlignSeries, IdenticalSeries) {
    auto s = with_timestamps({1, 2, 3, 4});
    auto r = align_series(s, s);
    EXPECT_EQ(r.a, s);
    EXPECT_EQ(r.b, s);
    EXPECT_EQ(r.dropped_a, 0u);
    EXPECT_EQ(r.dropped_b, 0u);
}

TEST(AlignSeries, DisjointFails) {
    EXPECT_THROW(align_series(with_timestamps({1, 2}), with_timestamps({3, 4})), DataError);
    EXPECT_THROW(align_series(with_timestamps({1, 2, 5}), with_timestamps({2, 3, 4})), DataError);
}

TEST(AlignSeries, SymmetricAndIdempotent) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<Timestamp> ta;
        std::vector<Timestamp> tb;
        for (Timestamp t = 0; t < 60; ++t) {
            if (rng() % 3) ta.push_back(t);
            if (rng() % 3) tb.push_back(t);
        }
        if (ta.size() < 2 || tb.size() < 2) continue;
        auto a = with_timestamps(ta);
        auto b = with_timestamps(tb);
        std::optional<AlignedPair> ab;
        try {
            ab = align_series(a, b);
        } catch (const DataError&) {
            EXPECT_THROW(align_series(b, a), DataError);
            continue;
        }
        auto ba = align_series(b, a);
        EXPECT_TRUE(std::equal(ab->a.timestamps().begin(), ab->a.timestamps().end(), ba.a.timestamps().begin(),
                               ba.a.timestamps().end()));
        EXPECT_EQ(ab->dropped_a, a.size() - ab->a.size());
        EXPECT_EQ(ab->dropped_b, b.size() - ab->b.size());
        auto again = align_series(ab->a, ab->b);
        EXPECT_EQ(again.a, ab->a);
        EXPECT_EQ(again.b, ab->b);
        EXPECT_EQ(again.dropped_a, 0u);
    }
}
