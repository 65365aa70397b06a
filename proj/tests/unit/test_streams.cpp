#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdf/errors.hpp"
#include "sdf/random.hpp"
#include "sdf/streams.hpp"

using namespace sdf;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("sdf_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

GeneratorConfig config(GeneratorKind kind, std::uint64_t seed = 7) {
    GeneratorConfig c;
    c.kind = kind;
    c.seed = seed;
    return c;
}

// Agrawal et al. loan-classification predicates, written out per function.
// Returns true for group A (class index 0).
bool agrawal_group_a(int f, const std::vector<double>& x) {
    const double salary = x[0], commission = x[1], age = x[2], loan = x[8];
    const int elevel = static_cast<int>(x[3]);
    const double hvalue = x[6], hyears = x[7];
    const bool young = age < 40, middle = age >= 40 && age < 60;
    auto within = [](double v, double a, double b) { return v >= a && v <= b; };
    const double disposable = 2.0 / 3.0 * (salary + commission);
    switch (f) {
    case 1: return !middle;
    case 2:
        return young ? within(salary, 50e3, 100e3) : middle ? within(salary, 75e3, 125e3) : within(salary, 25e3, 75e3);
    case 3:
        return young ? elevel <= 1 : middle ? (elevel >= 1 && elevel <= 3) : (elevel >= 2 && elevel <= 4);
    case 4: {
        const bool edu = young ? elevel <= 1 : middle ? (elevel >= 1 && elevel <= 3) : elevel >= 2;
        if (young) return edu ? within(salary, 25e3, 75e3) : within(salary, 50e3, 100e3);
        if (middle) return edu ? within(salary, 50e3, 100e3) : within(salary, 75e3, 125e3);
        return edu ? within(salary, 50e3, 100e3) : within(salary, 25e3, 75e3);
    }
    case 5: {
        if (young) return within(salary, 50e3, 100e3) ? within(loan, 100e3, 300e3) : within(loan, 200e3, 400e3);
        if (middle) return within(salary, 75e3, 125e3) ? within(loan, 200e3, 400e3) : within(loan, 300e3, 500e3);
        return within(salary, 25e3, 75e3) ? within(loan, 300e3, 500e3) : within(loan, 100e3, 300e3);
    }
    case 6: {
        const double t = salary + commission;
        return young ? within(t, 50e3, 100e3) : middle ? within(t, 75e3, 125e3) : within(t, 25e3, 75e3);
    }
    case 7: return disposable - loan / 5.0 - 20e3 > 0;
    case 8: return disposable - 5e3 * elevel - 20e3 > 0;
    case 9: return disposable - 5e3 * elevel - loan / 5.0 - 10e3 > 0;
    case 10: {
        const double equity = hyears < 20 ? 0.0 : 0.1 * hvalue * (hyears - 20);
        return disposable - 5e3 * elevel + 0.2 * equity - 10e3 > 0;
    }
    }
    return false;
}

}  // namespace

TEST_CASE("generator schemas") {
    auto sea = create_generator(config(GeneratorKind::sea));
    CHECK(sea->schema().num_features() == 3);
    CHECK(sea->schema().num_classes() == 2);

    auto agr = create_generator(config(GeneratorKind::agrawal));
    CHECK(agr->schema().num_features() == 9);
    CHECK(agr->schema().num_classes() == 2);

    auto rbf = create_generator(config(GeneratorKind::rbf));
    CHECK(rbf->schema().num_features() == 10);
    CHECK(rbf->schema().num_classes() == 5);
    for (const auto& f : rbf->schema().features()) CHECK_FALSE(f.is_nominal());
}

TEST_CASE("invalid generator parameters name the field") {
    auto c = config(GeneratorKind::agrawal);
    c.agrawal.function = 11;
    try {
        create_generator(c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "agrawal.function");
    }
    CHECK_THROWS_AS(generator_config_from({{"kind", "sea"}, {"sea.bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(generator_config_from({{"kind", "nope"}}), ConfigError);
    CHECK_THROWS_AS(generator_config_from({{"kind", "sea"}, {"sea.noise", "abc"}}), ConfigError);
    auto h = config(GeneratorKind::hyperplane);
    h.hyperplane.drift_features = 20;
    CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("key-value config files") {
    const auto path = write_temp("gen.cfg", "# sea stream\nkind = sea\nseed = 3\n\nsea.threshold = 9.5 # late concept\n");
    const auto c = generator_config_from(read_key_value_file(path));
    CHECK(c.kind == GeneratorKind::sea);
    CHECK(c.seed == 3);
    CHECK(c.sea.threshold == 9.5);
}

TEST_CASE("SEA label for f1=3, f2=4 under threshold 8") {
    // 3 + 4 <= 8 puts the point in class 0; a threshold of 6 flips it.
    auto c = config(GeneratorKind::sea);
    c.sea.noise_percent = 0;
    auto s = create_generator(c);
    bool saw_below = false, saw_above = false;
    for (int i = 0; i < 5000; ++i) {
        const auto inst = s->next();
        const double sum = inst->x[0] + inst->x[1];
        if (std::abs(sum - 7.0) < 0.05) {
            CHECK(*inst->y == 0);
            saw_below = true;
        }
        if (std::abs(sum - 9.0) < 0.05) {
            CHECK(*inst->y == 1);
            saw_above = true;
        }
    }
    CHECK(saw_below);
    CHECK(saw_above);
}

TEST_CASE("SEA labels match the oracle on 1000 draws per concept") {
    for (double threshold : {8.0, 9.0, 7.0, 9.5}) {
        auto c = config(GeneratorKind::sea, 11);
        c.sea.threshold = threshold;
        c.sea.noise_percent = 0;
        auto s = create_generator(c);
        for (int i = 0; i < 1000; ++i) {
            const auto inst = s->next();
            const int expected = inst->x[0] + inst->x[1] <= threshold ? 0 : 1;
            REQUIRE(*inst->y == expected);
        }
    }
}

TEST_CASE("SEA noise flips about 10% of labels") {
    auto c = config(GeneratorKind::sea, 5);
    auto s = create_generator(c);
    int flipped = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto inst = s->next();
        flipped += *inst->y != (inst->x[0] + inst->x[1] <= 8.0 ? 0 : 1);
    }
    CHECK(flipped / double(n) == doctest::Approx(0.10).epsilon(0.1));
}

TEST_CASE("AGRAWAL labels match the oracle on 1000 draws per function") {
    for (int f = 1; f <= 10; ++f) {
        CAPTURE(f);
        auto c = config(GeneratorKind::agrawal, 100 + f);
        c.agrawal.function = f;
        c.agrawal.perturbation = 0.0;
        auto s = create_generator(c);
        int group_a = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto inst = s->next();
            const int expected = agrawal_group_a(f, inst->x) ? 0 : 1;
            REQUIRE(*inst->y == expected);
            group_a += expected == 0;
        }
        CHECK(group_a > 0);
        CHECK(group_a < 1000);
    }
}

TEST_CASE("AGRAWAL feature ranges") {
    auto s = create_generator(config(GeneratorKind::agrawal));
    for (int i = 0; i < 2000; ++i) {
        const auto x = s->next()->x;
        CHECK(x[0] >= 20000);
        CHECK(x[0] <= 150000);
        CHECK(x[2] >= 20);
        CHECK(x[2] <= 80);
        if (x[0] >= 75000 * 1.2) CHECK(x[1] == 0.0);
    }
}

TEST_CASE("determinism across every generator and preset") {
    std::vector<std::unique_ptr<Stream>> a, b;
    for (auto kind : {GeneratorKind::sea, GeneratorKind::agrawal, GeneratorKind::rbf, GeneratorKind::hyperplane,
                      GeneratorKind::rtg}) {
        a.push_back(create_generator(config(kind, 42)));
        b.push_back(create_generator(config(kind, 42)));
    }
    for (auto name : {"SEA_a", "SEA_g", "AGR_a", "AGR_g", "RBF_m", "RBF_f", "HYPER", "RTG"}) {
        a.push_back(make_preset(name, 9, 4000));
        b.push_back(make_preset(name, 9, 4000));
    }
    for (std::size_t s = 0; s < a.size(); ++s) {
        for (int i = 0; i < 3000; ++i) {
            const auto x = a[s]->next();
            const auto y = b[s]->next();
            REQUIRE(x.has_value());
            REQUIRE(x->x == y->x);
            REQUIRE(x->y == y->y);
        }
    }
}

TEST_CASE("different seeds give different sequences") {
    auto a = create_generator(config(GeneratorKind::rtg, 1));
    auto b = create_generator(config(GeneratorKind::rtg, 2));
    int same = 0;
    for (int i = 0; i < 100; ++i) same += a->next()->x == b->next()->x;
    CHECK(same < 100);
}

TEST_CASE("schema conformance over 10000 draws of every generator") {
    for (auto kind : {GeneratorKind::sea, GeneratorKind::agrawal, GeneratorKind::rbf, GeneratorKind::hyperplane,
                      GeneratorKind::rtg}) {
        auto c = config(kind, 3);
        c.rbf.drift_speed = 0.001;
        c.hyperplane.mag_change = 0.001;
        auto s = create_generator(c);
        std::vector<int> counts(s->schema().num_classes());
        for (int i = 0; i < 10000; ++i) {
            const auto inst = s->next();
            REQUIRE(inst.has_value());
            REQUIRE(inst->y.has_value());
            REQUIRE_NOTHROW(s->schema().check(*inst));
            ++counts[*inst->y];
        }
        int used = 0;
        for (int c2 : counts) used += c2 > 0;
        CHECK(used >= 2);
    }
}

TEST_CASE("length caps the stream") {
    auto c = config(GeneratorKind::sea);
    c.length = 100;
    auto s = create_generator(c);
    int n = 0;
    while (s->next()) ++n;
    CHECK(n == 100);
    CHECK_FALSE(s->next().has_value());

    auto capped = take(create_generator(config(GeneratorKind::rtg)), 17);
    n = 0;
    while (capped->next()) ++n;
    CHECK(n == 17);
}

TEST_CASE("successor probability examples") {
    CHECK(successor_probability(500, 500, 10) == doctest::Approx(0.5));
    CHECK(successor_probability(400, 500, 10) < 1e-15);
    CHECK(successor_probability(510, 500, 10) == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))));
    CHECK(successor_probability(510, 500, 10) == doctest::Approx(0.982).epsilon(0.001));
    CHECK(successor_probability(499, 500, 1) < 0.02);
    CHECK(successor_probability(501, 500, 1) > 0.98);
}

TEST_CASE("drift mixing frequency follows the sigmoid") {
    // base always emits class 1, successor always class 0, so the label tells the source
    auto base_cfg = config(GeneratorKind::sea);
    base_cfg.sea.noise_percent = 0;
    base_cfg.sea.threshold = -1.0;
    auto succ_cfg = base_cfg;
    succ_cfg.sea.threshold = 100.0;
    const std::uint64_t p = 60, w = 40;
    const std::vector<std::uint64_t> points{20, 40, 50, 60, 70, 80, 100};
    std::vector<int> hits(points.size());
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        auto s = drift_wrap(create_generator(base_cfg), create_generator(succ_cfg), p, w, derive_seed(77, r));
        std::size_t k = 0;
        for (std::uint64_t t = 1; t <= points.back(); ++t) {
            const auto inst = s->next();
            if (t == points[k]) {
                hits[k] += *inst->y == 0;
                ++k;
            }
        }
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        CAPTURE(points[k]);
        CHECK(std::abs(hits[k] / double(runs) - successor_probability(points[k], p, w)) <= 0.03);
    }
}

TEST_CASE("drift_wrap rejects schema mismatch") {
    CHECK_THROWS_AS(drift_wrap(create_generator(config(GeneratorKind::sea)),
                               create_generator(config(GeneratorKind::agrawal)), 10, 1, 1),
                    ConfigError);
    DriftSpec spec;
    spec.position = 5;
    spec.successor = config(GeneratorKind::rbf);
    CHECK_THROWS_AS(drift_wrap(create_generator(config(GeneratorKind::sea)), spec), ConfigError);
}

TEST_CASE("abrupt preset switches concept at the quarter points") {
    const std::uint64_t n = 40000;
    auto s = make_preset("SEA_a", 3, n);
    // SEA noise is 10%; agreement with the active concept sits near 90%
    const std::array<double, 4> thresholds{8.0, 9.0, 7.0, 9.5};
    std::array<int, 4> agree{};
    for (std::uint64_t t = 1; t <= n; ++t) {
        const auto inst = s->next();
        const std::size_t segment = (t - 1) * 4 / n;
        const bool edge = (t % (n / 4)) < 20 || (t % (n / 4)) > n / 4 - 20;
        if (!edge) agree[segment] += *inst->y == (inst->x[0] + inst->x[1] <= thresholds[segment] ? 0 : 1);
    }
    for (int a : agree) CHECK(a / double(n / 4 - 40) > 0.87);
    CHECK_FALSE(s->next().has_value());
    CHECK(is_preset("agr_g"));
    CHECK_FALSE(is_preset("ELEC"));
    CHECK_THROWS_AS(make_preset("nope", 1, 10), ConfigError);
}

TEST_CASE("CSV loading") {
    const auto path = write_temp("small.csv", "a,b,class\n1.5,2,yes\n-3e2,0.25,no\n4,5,yes\n");
    auto s = load_dataset(path, DatasetFormat::csv);
    CHECK(s->schema().num_features() == 2);
    CHECK(s->schema().num_classes() == 2);
    int n = 0;
    std::vector<double> first;
    while (auto inst = s->next()) {
        if (n == 0) first = inst->x;
        CHECK_NOTHROW(s->schema().check(*inst));
        ++n;
    }
    CHECK(n == 3);
    CHECK(first == std::vector<double>{1.5, 2.0});
    CHECK(format_from_path(path) == DatasetFormat::csv);
}

TEST_CASE("electricity-format CSV") {
    const auto path = write_temp("elec.csv",
                                 "date,day,period,nswprice,nswdemand,vicprice,vicdemand,transfer,class\n"
                                 "0,2,0,0.056443,0.439155,0.003467,0.422915,0.414912,UP\n"
                                 "0,2,0.021277,0.051699,0.415055,0.003467,0.422915,0.414912,UP\n"
                                 "0,2,0.042553,0.051489,0.385004,0.003467,0.422915,0.414912,DOWN\n");
    auto s = load_dataset(path, DatasetFormat::csv);
    CHECK(s->schema().num_features() == 8);
    CHECK(s->schema().num_classes() == 2);
}

TEST_CASE("CSV errors") {
    CHECK_THROWS_AS(load_dataset(write_temp("nocls.csv", "a,b\n1,2\n"), DatasetFormat::csv), SchemaError);
    try {
        load_dataset(write_temp("short.csv", "a,b,class\n1,2,x\n3,y\n"), DatasetFormat::csv);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 3);
    }
    DatasetOptions opts;
    opts.class_column = "label";
    auto s = load_dataset(write_temp("lbl.csv", "label,a\nx,1\ny,2\n"), DatasetFormat::csv, opts);
    CHECK(s->schema().num_features() == 1);
}

TEST_CASE("ARFF loading") {
    const auto path = write_temp("ok.arff",
                                 "% comment\n@relation demo\n@attribute f numeric\n@attribute n {a,b}\n"
                                 "@attribute class {pos,neg}\n@data\n1.0,a,pos\n2.5,b,neg\n");
    auto s = load_dataset(path, DatasetFormat::arff);
    CHECK(s->schema().num_features() == 2);
    CHECK(s->schema().feature(1).is_nominal());
    const auto first = s->next();
    CHECK(first->x == std::vector<double>{1.0, 0.0});
    CHECK(*first->y == 0);
    CHECK(s->next().has_value());
    CHECK_FALSE(s->next().has_value());
    CHECK(format_from_path(path) == DatasetFormat::arff);
}

TEST_CASE("ARFF unknown nominal value reports its line") {
    const auto path = write_temp("bad.arff",
                                 "@relation demo\n@attribute n {a,b}\n@attribute class {x,y}\n@data\na,x\nc,y\n");
    auto s = load_dataset(path, DatasetFormat::arff);
    CHECK(s->next().has_value());
    try {
        s->next();
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 6);
    }
}
