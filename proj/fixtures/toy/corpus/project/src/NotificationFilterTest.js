"use strict";

const { test, assertTrue, assertFalse } = require("../harness/testkit.js");
const { NotificationFilter } = require("./NotificationFilter.js");

test("filterDropsBlockedSender", () => {
  const f = new NotificationFilter(["spammer"]);
  assertFalse(f.shouldDeliver({ sender: "spammer" }));
  assertTrue(f.shouldDeliver({ sender: "friend" }));
});
