"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { LocationSharer } = require("./LocationSharer.js");

test("locationFriendsSeeTwoDigits", () => {
  const s = new LocationSharer(["bob"]);
  assertEqual(s.sharedLocation("bob", 51.50735, -0.12776), { lat: 51.51, lon: -0.13 });
});
