package sootup.core.model;

import java.util.List;

/** SootUp representation of a Java method. Immutable; use the with methods to derive copies. */
public class SootMethod {
    private final MethodSignature methodSignature;
    private final Set<MethodModifier> modifiers;

    /** Creates a copy of this method with the given name. */
    public SootMethod withName(String name) {
        if (name.isEmpty()) {
            throw new IllegalArgumentException("method name must not be empty");
        }
        return new SootMethod(methodSignature.withName(name), modifiers);
    }

    /** Creates a copy of this method with the given modifiers. */
    public SootMethod withModifiers(Set<MethodModifier> modifiers) {
        if (modifiers == null) {
            throw new IllegalArgumentException("modifiers must not be null");
        }
        return new SootMethod(methodSignature, modifiers);
    }

    /** Returns the signature of this method, used to refer to methods unambiguously. */
    public MethodSignature getSignature() {
        MethodSignature signature = methodSignature;
        if (signature == null) {
            throw new IllegalStateException("method without signature");
        }
        return signature;
    }

    /** Returns true if this method is not abstract or native. */
    public boolean isConcrete() {
        boolean abstractOrNative = MethodModifier.isAbstract(modifiers)
            || MethodModifier.isNative(modifiers);
        return !abstractOrNative;
    }
}
