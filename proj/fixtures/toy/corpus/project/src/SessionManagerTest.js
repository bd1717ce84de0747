"use strict";

const { test, assertTrue, assertFalse } = require("../harness/testkit.js");
const { SessionManager } = require("./SessionManager.js");

test("sessionActiveAfterTouch", () => {
  const s = new SessionManager();
  s.touch("s1", 1000);
  assertTrue(s.isActive("s1", 2000));
});

test("sessionExpiresWhenIdle", () => {
  const s = new SessionManager();
  s.touch("s1", 0);
  assertFalse(s.isActive("s1", 16 * 60 * 1000));
});
