#include <doctest.h>

#include <cmath>
#include <limits>

#include "biweb/errors.hpp"
#include "json_out.hpp"
#include "model_file.hpp"

using nlohmann::json;
using namespace biweb;
using namespace biweb::cli;

namespace {

json exy_doc() {
  return json::parse(R"j({"kind": "explicit", "n": 1, "exprs": {"A": "exp(x*y)"},
                         "probe": {"window": [[-0.5, 0.5], [-0.5, 0.5]], "points": [[0.1, 0.2]]}})j");
}

}  // namespace

TEST_CASE("json writer round-trips reals and nulls non-finite ones") {
  const double third = 1.0 / 3.0;
  const json v = {{"a", third}, {"b", {1, 2}}, {"c", std::numeric_limits<double>::infinity()}, {"d", "s"}};
  const std::string text = dump_json(v, -1);
  CHECK(text == R"j({"a":0.33333333333333331,"b":[1, 2],"c":null,"d":"s"})j");
  CHECK(json::parse(text)["a"].get<double>() == third);
  CHECK(dump_json(json::parse("{\"x\": 0.1}")) == "{\n  \"x\": 0.10000000000000001\n}");
}

TEST_CASE("model files: kinds, sections and probes") {
  const ModelFile mf = parse_model(exy_doc());
  CHECK(mf.model->dim() == 1);
  CHECK(mf.points.size() == 1);
  CHECK(mf.in_window({0.4, -0.4}));
  CHECK_FALSE(mf.in_window({0.6, 0.0}));

  const json sphere = json::parse(R"j({"kind": "ray_space", "n": 3, "params": {"r": 1.0},
      "exprs": {"f": "sqrt(r^2 - s1^2 - s2^2)", "g": "-sqrt(r^2 - s1^2 - s2^2)"},
      "section": {"anchor": [0, 0, 0, 0], "i": 1, "j": 0},
      "probe": {"window": [[-0.5, 0.5], [-0.5, 0.5]]}})j");
  const ModelFile sec = parse_model(sphere);
  CHECK(sec.model->kind() == "section");
  CHECK(sec.ray);
  CHECK(sec.section->i == 1);

  const json product = json::parse(R"j({"kind": "product", "n": 2,
      "exprs": {"f": [["1", "x2"], ["0", "1"]], "g": [["1", "0"], ["y1", "1"]]},
      "probe": {"window": [[0, 1], [0, 1], [0, 1], [0, 1]]}})j");
  CHECK(parse_model(product).model->dim() == 2);
}

TEST_CASE("model files: schema violations are input errors") {
  auto broken = [](auto edit) {
    json d = exy_doc();
    edit(d);
    return d;
  };
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["extra"] = 1; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["kind"] = "cubic"; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["exprs"]["B"] = "1"; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["exprs"]["A"] = "exp(x*"; })), ParseError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["probe"]["points"] = {{0.9, 0.0}}; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["probe"]["window"] = {{0.5, -0.5}, {0, 1}}; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["options"] = {{"jet_order", 1}}; })), InputError);
  CHECK_THROWS_AS(parse_model(broken([](json& d) { d["section"] = {{"anchor", {0, 0}}, {"i", 1}, {"j", 0}}; })),
                  InputError);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), InputError);
}
