import { describe, expect, it } from "vitest";

import { ApiClient, buildDecisionBody } from "../src/api.js";
import { MockServer, makeItems } from "./mock_server.js";

function client(server: MockServer): ApiClient {
  return new ApiClient("", server.fetch);
}

describe("decision request bodies", () => {
  it("Wrong posts exactly {\"tag\":\"Wrong\"}", async () => {
    const server = new MockServer(makeItems(2));
    await client(server).submitDecision("s000", buildDecisionBody("Wrong", null, ""));
    expect(server.rawBodies).toEqual(['{"tag":"Wrong"}']);
  });

  it("Ambiguous posts exactly {\"tag\":\"Ambiguous\"}", async () => {
    const server = new MockServer(makeItems(2));
    await client(server).submitDecision("s000", buildDecisionBody("Ambiguous", null, ""));
    expect(server.rawBodies).toEqual(['{"tag":"Ambiguous"}']);
  });

  it("False posts exactly {\"tag\":\"False\"}", async () => {
    const server = new MockServer(makeItems(2));
    await client(server).submitDecision("s000", buildDecisionBody("False", null, ""));
    expect(server.rawBodies).toEqual(['{"tag":"False"}']);
  });

  it("Modify carries the chosen level", async () => {
    const server = new MockServer(makeItems(2));
    await client(server).submitDecision("s000", buildDecisionBody("Modify", "A2", ""));
    expect(server.rawBodies).toEqual(['{"tag":"Modify","new_label":"A2"}']);
  });

  it("a level chosen for a non-Modify tag is not sent", () => {
    expect(buildDecisionBody("Wrong", "A2", "")).toEqual({ tag: "Wrong" });
  });

  it("annotator is included only when set", async () => {
    const server = new MockServer(makeItems(2));
    await client(server).submitDecision(
      "s000", buildDecisionBody("Wrong", null, "leila"));
    expect(server.rawBodies).toEqual(['{"tag":"Wrong","annotator":"leila"}']);
  });
});

describe("response handling", () => {
  it("maps 2xx to ok results", async () => {
    const server = new MockServer(makeItems(1));
    const result = await client(server).stats();
    expect(result.ok).toBe(true);
    if (result.ok) expect(result.data.total).toBe(1);
  });

  it("maps error payloads to detail strings", async () => {
    const server = new MockServer(makeItems(1));
    const result = await client(server).submitDecision(
      "zzz", buildDecisionBody("Wrong", null, ""));
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.status).toBe(404);
      expect(result.detail).toContain("zzz");
    }
  });

  it("paging parameters reach the server", async () => {
    const server = new MockServer(makeItems(25));
    const page2 = await client(server).listTriage("pending", 2, 20);
    expect(page2.ok).toBe(true);
    if (page2.ok) {
      expect(page2.data.total).toBe(25);
      expect(page2.data.items).toHaveLength(5);
    }
  });
});
