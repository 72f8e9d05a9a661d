#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "certpri/dataset.hpp"
#include "certpri/error.hpp"
#include "certpri/io.hpp"

using namespace certpri;

TEST_CASE("missing cells take the mean of the column") {
    const Dataset d = parse_dataset_csv("f0,f1,label\n1,2,0\n,4,1\n3,,0\n");
    REQUIRE(d.rows == 3);
    CHECK(d.features[2] == 2.0);  // mean of 1 and 3
    CHECK(d.features[5] == 3.0);  // mean of 2 and 4
    CHECK(d.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("labels outside the class range are rejected") {
    DatasetReadOptions o;
    o.num_classes = 3;
    CHECK_THROWS_AS(parse_dataset_csv("f0,label\n1,0\n2,3\n", o), InputError);
    CHECK_THROWS_AS(parse_dataset_csv("f0,label\n1,-1\n"), InputError);
    CHECK_THROWS_AS(parse_dataset_csv("f0,label\n1,0.5\n"), InputError);
}

TEST_CASE("width mismatch names the line") {
    try {
        parse_dataset_csv("f0,f1\n1,2\n3\n");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("header validation") {
    CHECK_THROWS_AS(parse_dataset_csv("f0,f2\n1,2\n"), InputError);
    CHECK_THROWS_AS(parse_dataset_csv("f0,label,t0\n1,0,2\n"), InputError);
    CHECK_THROWS_AS(parse_dataset_csv("x,y\n1,2\n"), InputError);
    CHECK_THROWS_AS(parse_dataset_csv(""), InputError);
}

TEST_CASE("ground truth can be skipped without parsing it") {
    DatasetReadOptions o;
    o.read_ground_truth = false;
    const Dataset d = parse_dataset_csv("f0,label\n1,oops\n2,7\n", o);
    CHECK(d.rows == 2);
    CHECK_FALSE(d.has_labels());
    const Dataset r = parse_dataset_csv("f0,t0,t1\n1,2,3\n", o);
    CHECK_FALSE(r.has_targets());
}

TEST_CASE("CSV round trip is exact") {
    Dataset d;
    d.rows = 2;
    d.dim = 3;
    d.features = {0.1, -1e-300, 3.141592653589793, 1e22, -0.0, 2.0 / 3.0};
    d.target_dim = 2;
    d.targets = {1.0 / 7.0, -5, 0, 1e-17};
    const Dataset back = parse_dataset_csv(dataset_to_csv(d));
    CHECK(back.features == d.features);
    CHECK(back.targets == d.targets);
    CHECK(dataset_to_csv(back) == dataset_to_csv(d));

    const auto path = std::filesystem::temp_directory_path() / "certpri_ds_roundtrip.csv";
    save_dataset(d, path);
    CHECK(load_dataset(path).features == d.features);
    std::filesystem::remove(path);
}

TEST_CASE("byte order mark and CRLF are tolerated") {
    const Dataset d = parse_dataset_csv("\xEF\xBB\xBF" "f0,label\r\n1.5,1\r\n");
    CHECK(d.features[0] == 1.5);
    CHECK(d.labels[0] == 1);
}

TEST_CASE("strip_ground_truth") {
    const Dataset d = strip_ground_truth(parse_dataset_csv("f0,label\n1,0\n2,1\n"));
    CHECK_FALSE(d.has_labels());
    CHECK(d.features == std::vector<double>{1, 2});
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-310, -2.5e300, 123456789.0}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}
