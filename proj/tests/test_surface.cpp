#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mls/error.hpp"
#include "mls/surface.hpp"

using namespace mls;

namespace {

SurfaceScene noiseless() {
    SurfaceScene s;
    s.error.sd = 0.0;
    return s;
}

std::string scene_error(const Json& j) {
    try {
        scene_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("default curve passes through both anchor points") {
    const SurfaceCurve c;
    CHECK(c(2.0) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(c(16.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("generated grid layout and sign") {
    SurfaceScene s = noiseless();
    const PointCloud p = generate_scene(s, 1);
    REQUIRE(p.z.size() == 22 * 31);
    CHECK(p.xy(0, 0) == 0.0);
    CHECK(p.xy(0, 1) == 2.0);
    CHECK(p.xy(1, 0) == 0.0);  // x-major: y varies fastest
    CHECK(p.xy(p.z.size() - 1, 0) == 10.0);
    CHECK(p.xy(p.z.size() - 1, 1) == 16.0);
    CHECK(p.z[0] == doctest::Approx(16.0));

    s.sign = -1;
    CHECK((generate_scene(s, 1).z.array() < 0.0).all());
}

TEST_CASE("a curve that reaches zero on the grid is rejected") {
    SurfaceScene s;
    s.curve = {0.0, -1.0, 10.0};
    CHECK_THROWS_AS(generate_scene(s, 1), SignChange);
}

TEST_CASE("noisy scenes are reproducible from the seed") {
    const SurfaceScene s;
    CHECK(generate_scene(s, 4).z == generate_scene(s, 4).z);
    CHECK(generate_scene(s, 4).z != generate_scene(s, 5).z);
}

TEST_CASE("noiseless scene: every method recovers the curve exactly") {
    const auto fits = compare_methods(generate_scene(noiseless(), 1));
    REQUIRE(fits.size() == 3);
    const SurfaceCurve c;
    for (const auto& f : fits) {
        const std::string name(to_string(f.method));
        CAPTURE(name);
        CHECK(f.coefficients[0] == doctest::Approx(c.c0).epsilon(1e-4));
        CHECK(f.coefficients[2] == doctest::Approx(c.c1).epsilon(1e-4));
        CHECK(f.coefficients[4] == doctest::Approx(c.c2).epsilon(1e-4));
        CHECK(f.active_set() == std::vector<std::size_t>{0, 2, 4});
    }
}

TEST_CASE("depth sign carries through to the coefficients") {
    SurfaceScene s = noiseless();
    s.sign = -1;
    SurfaceOptions o;
    o.methods = {Method::PMLS};
    const auto fits = compare_methods(generate_scene(s, 1), o);
    CHECK(fits[0].coefficients[0] == doctest::Approx(-20.24).epsilon(1e-4));
    CHECK(fits[0].coefficients[4] == doctest::Approx(-0.07).epsilon(1e-4));
}

TEST_CASE("PMLS selection ignores the unit of z") {
    const PointCloud base = generate_scene(SurfaceScene{}, 3);
    SurfaceOptions o;
    o.methods = {Method::PMLS};
    const auto ref = compare_methods(base, o)[0];
    for (double c : {0.5, 2.0, 100.0}) {
        PointCloud scaled = base;
        scaled.z *= c;
        const auto f = compare_methods(scaled, o)[0];
        CAPTURE(c);
        CHECK(f.active_set() == ref.active_set());
        for (std::size_t k = 0; k < 6; ++k)
            CHECK(f.coefficients[k] == doctest::Approx(c * ref.coefficients[k]).epsilon(1e-6));
    }
}

TEST_CASE("zero and mixed-sign responses are data errors") {
    PointCloud p = generate_scene(noiseless(), 1);
    PointCloud zero = p;
    zero.z[5] = 0.0;
    CHECK_THROWS_AS(compare_methods(zero), DataError);
    PointCloud mixed = p;
    mixed.z[7] = -mixed.z[7];
    CHECK_THROWS_AS(compare_methods(mixed), DataError);
}

TEST_CASE("comparison CSV: header plus one six-coefficient row per method") {
    SurfaceOptions o;
    o.methods = {Method::Additive, Method::PMLS};
    const std::string csv = comparison_csv(compare_methods(generate_scene(noiseless(), 1), o));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,intercept,x,y,x2,y2,xy");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(rows == 2);
}

TEST_CASE("scene JSON round trip and field-path errors") {
    SurfaceScene s;
    s.sign = -1;
    s.seed = 77;
    s.curve.c0 = 19.0;
    CHECK(to_json(scene_from_json(to_json(s))) == to_json(s));
    CHECK(scene_error(Json{{"sign", 0}}).find("scene.sign") != std::string::npos);
    CHECK(scene_error(Json{{"colour", 1}}).find("scene.colour") != std::string::npos);
    CHECK(scene_error(Json::parse(R"({"grid": {"x_count": 0}})")).find("scene.grid") != std::string::npos);
    CHECK(scene_error(Json::parse(R"({"error": {"family": "cubic"}})")).find("scene.error.family") !=
          std::string::npos);
}
