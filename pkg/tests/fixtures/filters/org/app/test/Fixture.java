package org.app.test;

public interface Fixture {

    void prepare();
}
