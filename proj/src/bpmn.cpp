#include "bpsim/bpmn.hpp"

#include "bpsim/error.hpp"

#include <expat.h>

#include <memory>
#include <set>
#include <sstream>

namespace bpsim {

namespace {

constexpr std::string_view kModelNs = "http://www.omg.org/spec/BPMN/20100524/MODEL";

// Children of flow nodes that carry no semantics for the token game.
const std::set<std::string, std::less<>> kPassive{"incoming", "outgoing", "documentation", "conditionExpression"};

struct ParseState {
    GraphBuilder builder;
    int process_count = 0;
    int process_depth = -1;
    int depth = 0;
    int skip_depth = -1;  // subtree being ignored
    std::string error;
    XML_Parser parser = nullptr;
};

std::pair<std::string_view, std::string_view> split_name(const char* qname) {
    std::string_view n{qname};
    auto sp = n.find(' ');
    if (sp == std::string_view::npos) return {{}, n};
    return {n.substr(0, sp), n.substr(sp + 1)};
}

std::string attribute(const char** attrs, std::string_view key) {
    for (int i = 0; attrs[i]; i += 2) {
        auto [ns, local] = split_name(attrs[i]);
        if (ns.empty() && local == key) return attrs[i + 1];
    }
    return {};
}

void fail(ParseState& st, std::string msg) {
    if (st.error.empty()) {
        st.error = std::move(msg) + " (line " + std::to_string(XML_GetCurrentLineNumber(st.parser)) + ")";
        XML_StopParser(st.parser, XML_FALSE);
    }
}

void on_start(void* data, const char* qname, const char** attrs) {
    auto& st = *static_cast<ParseState*>(data);
    const int depth = st.depth++;
    if (st.skip_depth >= 0) return;

    auto [ns, local] = split_name(qname);
    const bool model_ns = ns.empty() || ns == kModelNs;
    if (!model_ns || local == "extensionElements") {
        st.skip_depth = depth;
        return;
    }
    if (depth == 0) {
        if (local != "definitions") fail(st, "root element must be definitions, found '" + std::string(local) + "'");
        return;
    }
    if (local == "process") {
        if (st.process_depth >= 0) return fail(st, "nested process elements are not supported");
        if (++st.process_count > 1) return fail(st, "only one process per file is supported");
        st.process_depth = depth;
        return;
    }
    if (st.process_depth < 0) {
        fail(st, "unsupported BPMN element '" + std::string(local) + "'");
        return;
    }
    if (depth > st.process_depth + 1) {
        if (kPassive.contains(local)) return;
        return fail(st, "unsupported BPMN element '" + std::string(local) + "'");
    }
    const std::string id = attribute(attrs, "id");
    if (id.empty() && local != "documentation")
        return fail(st, "element '" + std::string(local) + "' has no id");
    if (local == "startEvent") {
        st.builder.start(id);
    } else if (local == "endEvent") {
        st.builder.end(id);
    } else if (local == "task") {
        std::string name = attribute(attrs, "name");
        st.builder.task(id, name.empty() ? id : name);
    } else if (local == "exclusiveGateway") {
        st.builder.exclusive_gateway(id);
    } else if (local == "parallelGateway") {
        st.builder.parallel_gateway(id);
    } else if (local == "sequenceFlow") {
        st.builder.flow(id, attribute(attrs, "sourceRef"), attribute(attrs, "targetRef"));
    } else if (local == "documentation") {
        st.skip_depth = depth;
    } else {
        fail(st, "unsupported BPMN element '" + std::string(local) + "'");
    }
}

void on_end(void* data, const char*) {
    auto& st = *static_cast<ParseState*>(data);
    const int depth = --st.depth;
    if (st.skip_depth == depth) st.skip_depth = -1;
    if (st.process_depth == depth) st.process_depth = -1;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

ProcessGraph parse_bpmn(std::string_view xml) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreateNS(nullptr, ' '), &XML_ParserFree);
    if (!parser) throw Error("cannot create XML parser");
    ParseState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), &on_start, &on_end);
    const auto status = XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE);
    if (!st.error.empty()) throw ParseError(st.error);
    if (status != XML_STATUS_OK)
        throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())) +
                         " (line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ")");
    if (st.process_count == 0) throw ParseError("no process element found");

    ProcessGraph graph = st.builder.build();
    auto problems = graph.violations();
    if (!problems.empty()) {
        std::string msg = "BPMN graph violates invariants:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return graph;
}

std::string write_bpmn(const ProcessGraph& graph, const std::string& process_id) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<definitions xmlns=\"" << kModelNs << "\" id=\"definitions\">\n"
       << "  <process id=\"" << escape_xml(process_id) << "\" isExecutable=\"false\">\n";
    for (const auto& n : graph.nodes()) {
        const std::string id = escape_xml(n.id);
        switch (n.kind) {
            case NodeKind::StartEvent: os << "    <startEvent id=\"" << id << "\"/>\n"; break;
            case NodeKind::EndEvent: os << "    <endEvent id=\"" << id << "\"/>\n"; break;
            case NodeKind::Task:
                os << "    <task id=\"" << id << "\" name=\"" << escape_xml(n.label) << "\"/>\n";
                break;
            case NodeKind::ExclusiveSplit:
            case NodeKind::ExclusiveJoin: os << "    <exclusiveGateway id=\"" << id << "\"/>\n"; break;
            case NodeKind::ParallelSplit:
            case NodeKind::ParallelJoin: os << "    <parallelGateway id=\"" << id << "\"/>\n"; break;
        }
    }
    for (const auto& f : graph.flows())
        os << "    <sequenceFlow id=\"" << escape_xml(f.id) << "\" sourceRef=\"" << escape_xml(graph.node(f.source).id)
           << "\" targetRef=\"" << escape_xml(graph.node(f.target).id) << "\"/>\n";
    os << "  </process>\n</definitions>\n";
    return os.str();
}

}  // namespace bpsim
