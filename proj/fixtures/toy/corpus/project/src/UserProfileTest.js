"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { UserProfile } = require("./UserProfile.js");

test("profileShowsVisibleName", () => {
  const p = new UserProfile("Alice", "alice@example.com", false);
  assertEqual(p.displayName(), "Alice");
});

test("profileMasksEmail", () => {
  const p = new UserProfile("Alice", "alice@example.com", false);
  assertEqual(p.maskedEmail(), "a***@example.com");
});
