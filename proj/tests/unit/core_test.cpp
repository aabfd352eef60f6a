#include "ptab/core/csv.hpp"
#include "ptab/core/data.hpp"
#include "ptab/core/error.hpp"
#include "ptab/core/folds.hpp"
#include "ptab/core/parallel.hpp"
#include "ptab/core/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace ptab;

namespace {

std::vector<std::uint64_t> draws(RngStream rng, std::size_t count) {
    std::vector<std::uint64_t> out(count);
    for (auto& v : out) v = rng();
    return out;
}

IidDataset random_iid(std::size_t n, std::size_t d, RngStream& rng) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<int> a(n);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal() * 1e3;
        a[i] = rng.bernoulli(0.5) ? 1 : 0;
        y[static_cast<Eigen::Index>(i)] = rng.normal() / 7.0;
    }
    return {std::move(x), std::move(a), std::move(y)};
}

}  // namespace

TEST(Rng, SameSeedAndStreamReproduce) {
    EXPECT_EQ(draws(RngStream(42, 7), 10000), draws(RngStream(42, 7), 10000));
    EXPECT_EQ(draws(RngStream(42).child(3), 10000), draws(RngStream(42).child(3), 10000));
}

TEST(Rng, DistinctStreamsDiffer) {
    const auto base = draws(RngStream(42, 0), 10000);
    for (std::uint64_t id = 1; id < 20; ++id) {
        EXPECT_NE(base, draws(RngStream(42, id), 10000));
        EXPECT_NE(base, draws(RngStream(42).child(id), 10000));
    }
    EXPECT_NE(draws(RngStream(1, 5), 100), draws(RngStream(2, 5), 100));
}

TEST(Rng, UniformStaysInOpenInterval) {
    RngStream rng(9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(Rng, NormalMoments) {
    RngStream rng(10);
    const int m = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s1 / m, 0.0, 3.0 / std::sqrt(m));
    EXPECT_NEAR(s2 / m, 1.0, 3.0 * std::sqrt(2.0 / m));
}

TEST(Rng, BelowIsUniform) {
    RngStream rng(11);
    std::array<int, 7> counts{};
    const int m = 70000;
    for (int i = 0; i < m; ++i) ++counts[rng.below(7)];
    const double expected = m / 7.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 22.46);  // chi-square(6) upper 0.1% point
}

TEST(Rng, StudentTVariance) {
    RngStream rng(12);
    const int m = 200000;
    double s2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = rng.student_t(10);
        s2 += t * t;
    }
    // Var t_10 = 10 / 8; the fourth moment gives the SE of the sample second moment.
    const double var = 10.0 / 8.0;
    const double m4 = 3.0 * 100.0 / (8.0 * 6.0);
    EXPECT_NEAR(s2 / m, var, 4.0 * std::sqrt((m4 - var * var) / m));
}

TEST(Folds, SizesFollowRemainderRule) {
    RngStream rng(1);
    auto f = kfold_split(4, 2, rng);
    EXPECT_EQ(f.members(0).size(), 2u);
    EXPECT_EQ(f.members(1).size(), 2u);
    f = kfold_split(5, 2, rng);
    EXPECT_EQ(f.members(0).size(), 3u);
    EXPECT_EQ(f.members(1).size(), 2u);
}

TEST(Folds, DeterministicGivenStream) {
    RngStream a(77);
    RngStream b(77);
    EXPECT_EQ(kfold_split(10, 5, a).fold, kfold_split(10, 5, b).fold);
}

TEST(Folds, PartitionPropertyExhaustive) {
    for (std::size_t n = 2; n <= 50; ++n) {
        for (std::size_t k = 2; k <= n; ++k) {
            RngStream rng(n * 1000 + k);
            const auto f = kfold_split(n, k, rng);
            ASSERT_EQ(f.fold.size(), n);
            std::vector<int> seen(n, 0);
            std::size_t lo = n;
            std::size_t hi = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const auto m = f.members(j);
                lo = std::min(lo, m.size());
                hi = std::max(hi, m.size());
                for (auto i : m) ++seen[i];
                auto c = f.complement(j);
                ASSERT_EQ(c.size() + m.size(), n);
                std::vector<std::size_t> all;
                std::merge(m.begin(), m.end(), c.begin(), c.end(), std::back_inserter(all));
                std::vector<std::size_t> iota(n);
                std::iota(iota.begin(), iota.end(), 0);
                ASSERT_EQ(all, iota);
            }
            ASSERT_LE(hi - lo, 1u);
            ASSERT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        }
    }
}

TEST(Folds, RejectsBadK) {
    RngStream rng(1);
    EXPECT_THROW((void)kfold_split(5, 1, rng), std::invalid_argument);
    EXPECT_THROW((void)kfold_split(5, 6, rng), std::invalid_argument);
}

TEST(Folds, PermutationIsBijection) {
    for (std::size_t n = 1; n < 40; ++n) {
        RngStream rng(n);
        auto p = random_permutation(n, rng);
        std::sort(p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(p[i], i);
    }
}

TEST(Data, IidInvariants) {
    Eigen::MatrixXd x(2, 1);
    x << 1, 2;
    Eigen::VectorXd y(2);
    y << 0, 1;
    EXPECT_THROW(IidDataset(x, {0, 2}, y), std::invalid_argument);
    EXPECT_THROW(IidDataset(x.topRows(1), {0}, y.head(1)), std::invalid_argument);
    y[1] = std::nan("");
    EXPECT_THROW(IidDataset(x, {0, 1}, y), std::invalid_argument);
}

TEST(Csv, LoadsWellFormedFile) {
    std::istringstream in("y,a,x1,x2\n1.5,1,0.1,0.2\n-2,0,3,4\n0,1,5,6\n");
    const IidDataset d = read_iid_csv(in);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.dim(), 2u);
    EXPECT_EQ(d.a()[0], 1);
    EXPECT_DOUBLE_EQ(d.y()[1], -2.0);
    EXPECT_DOUBLE_EQ(d.x()(2, 1), 6.0);
}

TEST(Csv, NonBinaryTreatmentNamesLine) {
    std::istringstream in("y,a,x1\n1,1,0\n2,0,0\n3,2,0\n");
    try {
        (void)read_iid_csv(in);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
}

TEST(Csv, RaggedAndNonNumericRowsFail) {
    std::istringstream ragged("y,a,x1\n1,1,0\n2,0\n");
    EXPECT_THROW((void)read_iid_csv(ragged), ParseError);
    std::istringstream text("y,a,x1\n1,1,abc\n2,0,1\n");
    EXPECT_THROW((void)read_iid_csv(text), ParseError);
}

TEST(Csv, EmptyBodyIsInvalid) {
    std::istringstream in("y,a,x1\n");
    EXPECT_THROW((void)read_iid_csv(in), std::invalid_argument);
}

TEST(Csv, IidRoundTripIsBitExact) {
    RngStream rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const IidDataset d = random_iid(30, 3, rng);
        std::stringstream s;
        write_iid_csv(s, d);
        const IidDataset back = read_iid_csv(s);
        ASSERT_EQ(back.a(), d.a());
        ASSERT_TRUE((back.x().array() == d.x().array()).all());
        ASSERT_TRUE((back.y().array() == d.y().array()).all());
    }
}

TEST(Csv, PanelLoadsAndChecksLayout) {
    std::istringstream ok("day,t,a,y,x1\n1,1,0,1,0\n1,2,1,2,0\n1,3,0,3,0\n2,1,1,1,1\n2,2,0,2,1\n2,3,1,3,1\n");
    const PanelDataset p = read_panel_csv(ok);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(p.horizon(), 3u);
    EXPECT_EQ(p.dim(), 1u);

    std::istringstream missing("day,t,a,y,x1\n1,1,0,1,0\n1,2,1,2,0\n2,1,1,1,1\n");
    EXPECT_THROW((void)read_panel_csv(missing), SchemaError);
    std::istringstream gap("day,t,a,y,x1\n1,1,0,1,0\n1,2,1,2,0\n2,1,1,1,1\n2,3,0,2,1\n");
    EXPECT_THROW((void)read_panel_csv(gap), SchemaError);
    std::istringstream unsorted("day,t,a,y,x1\n1,2,0,1,0\n1,1,1,2,0\n2,1,1,1,1\n2,2,0,2,1\n");
    EXPECT_THROW((void)read_panel_csv(unsorted), SchemaError);
    std::istringstream dup("day,t,a,y,x1\n1,1,0,1,0\n1,1,1,2,0\n2,1,1,1,1\n2,2,0,2,1\n");
    EXPECT_THROW((void)read_panel_csv(dup), SchemaError);
}

TEST(Csv, PanelRoundTripIsBitExact) {
    RngStream rng(6);
    std::vector<Trajectory> days(4);
    for (auto& d : days) {
        d.x = Eigen::MatrixXd(5, 2);
        d.y = Eigen::VectorXd(5);
        for (int t = 0; t < 5; ++t) {
            d.x(t, 0) = rng.normal();
            d.x(t, 1) = rng.normal() * 1e-7;
            d.y[t] = rng.normal() * 1e5;
            d.a.push_back(rng.bernoulli(0.5) ? 1 : 0);
        }
    }
    const PanelDataset panel(days);
    std::stringstream s;
    write_panel_csv(s, panel);
    const PanelDataset back = read_panel_csv(s);
    ASSERT_EQ(back.size(), panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        EXPECT_EQ(back.day(i).a, panel.day(i).a);
        EXPECT_TRUE((back.day(i).x.array() == panel.day(i).x.array()).all());
        EXPECT_TRUE((back.day(i).y.array() == panel.day(i).y.array()).all());
    }
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    auto run = [](std::size_t threads) {
        std::vector<double> out(257);
        parallel_for(out.size(), threads, [&](std::size_t i) {
            RngStream rng = RngStream(3).child(i);
            out[i] = rng.normal();
        });
        return out;
    };
    EXPECT_EQ(run(1), run(8));
}

TEST(Parallel, RethrowsWorkerException) {
    EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}
