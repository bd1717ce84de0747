"use strict";

const { test, assertTrue, assertFalse } = require("../harness/testkit.js");
const { ConsentManager } = require("./ConsentManager.js");

test("consentGrantAllowsSharing", () => {
  const c = new ConsentManager();
  c.grant("u1", "photos");
  assertTrue(c.canShare("u1", "photos"));
});

test("consentUnknownUserCannotShare", () => {
  const c = new ConsentManager();
  assertFalse(c.canShare("nobody", "photos"));
});
