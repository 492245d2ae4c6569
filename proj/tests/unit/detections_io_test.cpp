#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lotscan/detections_io.hpp"
#include "lotscan/errors.hpp"

using namespace lotscan;

TEST_CASE("round trip through the jsonl format") {
    std::vector<Detection> dets;
    Detection a;
    a.image_id = "parcel_0";
    a.label = "vehicle";
    a.score = 0.75;
    a.bbox = {1.5, 2.5, 10.0, 12.0};
    dets.push_back(a);

    Detection b;
    b.image_id = "parcel_1";
    b.label = "parking_space";
    b.score = 0.5;
    b.bbox = {0, 0, 4, 4};
    RleMask m;
    m.width = 2;
    m.height = 2;
    m.counts = {1, 2, 1};
    b.rle = m;
    dets.push_back(b);

    const auto back = parse_detections_jsonl(detections_to_jsonl(dets));
    REQUIRE(back.size() == 2);
    CHECK(back[0].image_id == "parcel_0");
    CHECK(back[0].score == 0.75);
    CHECK(back[0].bbox == a.bbox);
    CHECK_FALSE(back[0].rle.has_value());
    REQUIRE(back[1].rle.has_value());
    CHECK(back[1].rle->counts == m.counts);
}

TEST_CASE("blank lines are skipped") {
    const auto dets = parse_detections_jsonl(
        "\n{\"image_id\":\"a\",\"label\":\"vehicle\",\"score\":0.5,\"bbox\":[0,0,1,1]}\n\n");
    CHECK(dets.size() == 1);
}

TEST_CASE("schema errors carry 1-based line numbers") {
    const std::string good =
        R"({"image_id":"a","label":"vehicle","score":0.5,"bbox":[0,0,1,1]})";
    const std::string missing_bbox = R"({"image_id":"a","label":"vehicle","score":0.5})";

    try {
        parse_detections_jsonl(good + "\n" + good + "\n" + missing_bbox + "\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    try {
        parse_detections_jsonl("this is not json\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("inverted bbox and out-of-range score are rejected") {
    try {
        parse_detections_jsonl(
            R"({"image_id":"a","label":"vehicle","score":0.5,"bbox":[5,0,1,1]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema);
    }
    try {
        parse_detections_jsonl(
            R"({"image_id":"a","label":"vehicle","score":1.5,"bbox":[0,0,1,1]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema);
    }
}
