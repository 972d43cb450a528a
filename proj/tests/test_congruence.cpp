#include <set>
#include <string>

#include "csn/congruence.hpp"
#include "csn/energy.hpp"
#include "csn/names.hpp"
#include "csn/parser.hpp"
#include "csn/printer.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace csn;

TEST_CASE("energy arithmetic is exact fixed-point") {
    CHECK(Energy::parse("100").micros() == 100'000'000);
    CHECK(Energy::parse("2.5").str() == "2.5");
    CHECK(Energy::parse("0.000001").micros() == 1);
    CHECK(Energy::parse("-3.25").str() == "-3.25");
    CHECK((Energy::parse("0.1") + Energy::parse("0.2")).str() == "0.3");
    Energy e = Energy::from_units(100);
    for (int i = 0; i < 1000; ++i) e -= Energy::parse("0.1");
    CHECK(e == Energy::from_units(0));
    CHECK(Energy::parse("89.500000").str() == "89.5");
    CHECK_THROWS_AS(Energy::parse("0.0000001"), EnergyError);   // 7 fractional digits
    CHECK_THROWS_AS(Energy::parse("1e3"), EnergyError);
    CHECK_THROWS_AS(Energy::parse("ten"), EnergyError);
    CHECK(max_energy(Energy::from_units(1), Energy::from_units(10)) == Energy::from_units(10));
}

TEST_CASE("parallel composition is a commutative monoid up to congruence") {
    testgen::Gen gen(424242);
    for (int i = 0; i < 10000; ++i) {
        ProgramPtr p = gen.program(4);
        ProgramPtr q = gen.program(4);
        ProgramPtr r = gen.program(3);

        CHECK(program_eq(normalize(make_par(p, q)), normalize(make_par(q, p))));
        CHECK(program_eq(normalize(make_par(make_par(p, q), r)),
                         normalize(make_par(p, make_par(q, r)))));
        CHECK(program_eq(normalize(make_par(p, make_idle())), normalize(p)));
        CHECK(program_eq(normalize(make_par(make_idle(), p)), normalize(p)));
    }
}

TEST_CASE("idle is the unit of sequencing") {
    testgen::Gen gen(7);
    for (int i = 0; i < 5000; ++i) {
        ProgramPtr p = gen.program(4);
        CHECK(program_eq(normalize(make_seq(make_idle(), p)), normalize(p)));
        CHECK(program_eq(normalize(make_seq(p, make_idle())), normalize(p)));
        CHECK(program_eq(normalize(make_seq(make_idle(), make_seq(p, make_idle()))), normalize(p)));
    }
}

TEST_CASE("normalization is idempotent") {
    testgen::Gen gen(90210);
    for (int i = 0; i < 10000; ++i) {
        ProgramPtr p = gen.program(5);
        ProgramPtr n1 = normalize(p);
        CHECK(program_eq(normalize(n1), n1));
    }
}

TEST_CASE("normalization commutes with substitution") {
    testgen::Gen gen(1312);
    for (int i = 0; i < 5000; ++i) {
        ProgramPtr p = gen.program(4);
        std::set<std::string> fv = free_names(p);
        if (fv.empty()) continue;
        Subst subst{{*fv.begin(), Value{MeasureVal{4.5}}}};
        CHECK(program_eq(normalize(substitute(p, subst)), normalize(substitute(normalize(p), subst))));
    }
}

TEST_CASE("normalization reaches under binders and into module values") {
    ProgramPtr p = parse_program("sense x in (net.d[x] | net.a[x]; idle)");
    ProgramPtr q = parse_program("sense x in (net.a[x] | net.d[x])");
    CHECK(program_eq(normalize(p), normalize(q)));

    ProgramPtr m1 = parse_program("install { go = () this.d[] | this.a[] }");
    ProgramPtr m2 = parse_program("install { go = () this.a[] | this.d[] }");
    CHECK(program_eq(normalize(m1), normalize(m2)));
}

TEST_CASE("canonical threads are sorted and idle-free") {
    ProgramPtr p = parse_program("net.z[] | idle | net.a[]; net.d[] | idle");
    CanonicalProgram cp = normalize_program(p);
    REQUIRE(cp.threads.size() == 2);
    CHECK(pretty(cp.threads[0][0]) == "net.a[]");
    REQUIRE(cp.threads[0].size() == 2);
    CHECK(pretty(cp.threads[1][0]) == "net.z[]");
    CHECK(normalize_program(parse_program("idle")).threads.empty());
}

TEST_CASE("network congruence ignores listing order and thread order") {
    const char* a_text =
        "[net.a[] | net.d[], {}] s1 | [idle, { m = () idle }] s2\n"
        "@s1 position = (0, 0) radius = 2 battery = 50\n"
        "@s2 position = (1, 0) radius = 2 battery = 60\n";
    const char* b_text =
        "[idle, { m = () idle }] s2 | [net.d[] | net.a[], {}] s1\n"
        "@s1 position = (0, 0) radius = 2 battery = 50\n"
        "@s2 position = (1, 0) radius = 2 battery = 60\n";
    EnergyConfig cfg;
    Network a = parse_network(a_text).network;
    Network b = parse_network(b_text).network;
    CHECK(congruent(a, b, cfg));
    CHECK(canonical_print(a, cfg) == canonical_print(b, cfg));
    CHECK(canonical_hash(a, cfg) == canonical_hash(b, cfg));

    // different battery is a different state
    Network c = parse_network(b_text).network;
    c.sensors[0].battery = Energy::from_units(61);
    CHECK(!congruent(a, c, cfg));
}

TEST_CASE("a sensor that cannot fund any step is congruent to absence") {
    const char* live_text =
        "[net.a[], {}] s1 | [idle, {}] weak\n"
        "@s1 battery = 50\n@weak battery = 5\n";
    const char* gone_text = "[net.a[], {}] s1\n@s1 battery = 50\n";
    Network with_weak = parse_network(live_text).network;
    Network without = parse_network(gone_text).network;

    EnergyConfig cfg;  // threshold max(1, 10) = 10 > 5
    CHECK(congruent(with_weak, without, cfg));

    EnergyConfig cheap;
    cheap.c_out = Energy::from_units(3);  // threshold 3 <= 5: the weak sensor stays on
    CHECK(!congruent(with_weak, without, cheap));
}

TEST_CASE("canonical network preserves expired bookkeeping") {
    Network n = parse_network("[idle, {}] s1\n").network;
    n.expired.push_back(ExpiredSensor{"old", Energy::parse("2.5")});
    EnergyConfig cfg;
    Network canon = canonical_network(n, cfg);
    REQUIRE(canon.expired.size() == 1);
    CHECK(canon.expired[0].name == "old");
    CHECK(canon.expired[0].residual == Energy::parse("2.5"));
}
