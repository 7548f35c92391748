#include <catch_amalgamated.hpp>

#include "bpsim/bpmn.hpp"
#include "bpsim/error.hpp"

#include "../support/synthetic.hpp"

using namespace bpsim;

namespace {

const char* kLinear = R"(<?xml version="1.0" encoding="UTF-8"?>
<bpmn:definitions xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL"
                  xmlns:bpmndi="http://www.omg.org/spec/BPMN/20100524/DI"
                  xmlns:dc="http://www.omg.org/spec/DD/20100524/DC" id="d1">
  <bpmn:process id="p1" isExecutable="false">
    <bpmn:startEvent id="s"><bpmn:outgoing>f1</bpmn:outgoing></bpmn:startEvent>
    <bpmn:task id="t1" name="Check order">
      <bpmn:documentation>first step</bpmn:documentation>
    </bpmn:task>
    <bpmn:task id="t2" name="Ship order"/>
    <bpmn:endEvent id="e"/>
    <bpmn:sequenceFlow id="f1" sourceRef="s" targetRef="t1"/>
    <bpmn:sequenceFlow id="f2" sourceRef="t1" targetRef="t2"/>
    <bpmn:sequenceFlow id="f3" sourceRef="t2" targetRef="e"/>
  </bpmn:process>
  <bpmndi:BPMNDiagram id="diagram"><bpmndi:BPMNPlane id="plane"/></bpmndi:BPMNDiagram>
</bpmn:definitions>)";

std::string with_process(const std::string& body) {
    return R"(<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"><process id="p">)" + body +
           "</process></definitions>";
}

}  // namespace

TEST_CASE("a linear model parses to one path", "[bpmn]") {
    const auto g = parse_bpmn(kLinear);
    CHECK(g.nodes().size() == 4);
    CHECK(g.flows().size() == 3);
    CHECK(g.activity_labels() == std::vector<std::string>{"Check order", "Ship order"});
    CHECK(g.violations().empty());
    const auto t1 = g.find_task("Check order");
    REQUIRE(t1);
    CHECK(g.node(*t1).id == "t1");
}

TEST_CASE("gateways are classified by arc counts", "[bpmn]") {
    const auto g = synthetic::xor_graph();
    CHECK(g.node(*g.find_node("split")).kind == NodeKind::ExclusiveSplit);
    CHECK(g.node(*g.find_node("join")).kind == NodeKind::ExclusiveJoin);
    const auto a = synthetic::and_graph();
    CHECK(a.node(*a.find_node("fork")).kind == NodeKind::ParallelSplit);
    CHECK(a.node(*a.find_node("sync")).kind == NodeKind::ParallelJoin);
    CHECK(g.exclusive_splits().size() == 1);
}

TEST_CASE("write then parse gives the same graph", "[bpmn]") {
    for (const auto& g : {parse_bpmn(kLinear), synthetic::xor_graph(), synthetic::and_graph(),
                          synthetic::fifteen_activity_graph()}) {
        CHECK(parse_bpmn(write_bpmn(g)) == g);
    }
}

TEST_CASE("unsupported elements are rejected by name", "[bpmn]") {
    const auto xml = with_process(R"(<startEvent id="s"/><inclusiveGateway id="g"/><endEvent id="e"/>
        <sequenceFlow id="f" sourceRef="s" targetRef="e"/>)");
    try {
        parse_bpmn(xml);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("inclusiveGateway") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_bpmn(with_process(R"(<subProcess id="x"/>)")), ParseError);
}

TEST_CASE("malformed documents", "[bpmn]") {
    CHECK_THROWS_AS(parse_bpmn("<definitions"), ParseError);
    CHECK_THROWS_AS(parse_bpmn(R"(<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"/>)"),
                    ParseError);
    CHECK_THROWS_AS(parse_bpmn(R"(<process xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"/>)"), ParseError);
}

TEST_CASE("structural violations", "[bpmn]") {
    // task with two outgoing flows
    const auto fork_task = with_process(R"(<startEvent id="s"/><task id="a" name="A"/><endEvent id="e1"/>
        <endEvent id="e2"/><sequenceFlow id="f0" sourceRef="s" targetRef="a"/>
        <sequenceFlow id="f1" sourceRef="a" targetRef="e1"/><sequenceFlow id="f2" sourceRef="a" targetRef="e2"/>)");
    CHECK_THROWS_AS(parse_bpmn(fork_task), ValidationError);
    // dangling reference
    const auto dangling = with_process(R"(<startEvent id="s"/><endEvent id="e"/>
        <sequenceFlow id="f0" sourceRef="s" targetRef="nowhere"/>)");
    CHECK_THROWS_AS(parse_bpmn(dangling), ValidationError);
    // no start event
    const auto no_start = with_process(R"(<task id="a" name="A"/><endEvent id="e"/>
        <sequenceFlow id="f0" sourceRef="a" targetRef="e"/>)");
    CHECK_THROWS_AS(parse_bpmn(no_start), ValidationError);
    // duplicate labels
    CHECK_THROWS_AS(GraphBuilder().start("s").task("a", "X").task("b", "X").end("e").build(), ValidationError);
}
